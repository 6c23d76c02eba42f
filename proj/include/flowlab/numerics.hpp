#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "flowlab/curve.hpp"

namespace flowlab {

// Solve a tridiagonal system (Thomas algorithm). lower[0] and upper[n-1]
// are ignored. Overwrites nothing; returns the solution.
std::vector<double> solve_tridiagonal(std::span<const double> lower,
                                      std::span<const double> diag,
                                      std::span<const double> upper,
                                      std::span<const double> rhs);

// Periodic variant: lower[0] couples x[0] to x[n-1] and upper[n-1]
// couples x[n-1] to x[0] (Sherman-Morrison).
std::vector<double> solve_cyclic_tridiagonal(std::span<const double> lower,
                                             std::span<const double> diag,
                                             std::span<const double> upper,
                                             std::span<const double> rhs);

// Golden-section minimum of a unimodal function on [a, b].
double golden_minimize(const std::function<double(double)>& f, double a,
                       double b, double tol);

// erf(b) - erf(a) without cancellation for large same-sign arguments.
double erf_diff(double a, double b);

// sum over segments of 0.5 * exp(-d_perp^2/tau) * [erf((s+l)/sqrt(tau)) -
// erf(s/sqrt(tau))] -- the Gaussian line integral of exp(-|p|^2/tau) along
// the polyline, divided by sqrt(pi*tau). Each segment is integrated in
// closed form, so arbitrarily long straight segments carry their full mass.
double gaussian_weighted_length(const Polyline& p, double tau);
// Largest weight exp(-|q|^2/tau) over the endpoints of an open polyline.
double endpoint_gaussian_weight(const Polyline& p, double tau);

// In-place radix-2 complex FFT (n a power of two); inverse divides by n.
void fft(std::vector<std::complex<double>>& a, bool inverse);

// Least-squares slope of y against x.
double ls_slope(std::span<const double> x, std::span<const double> y);

// Principal direction (unit eigenvector of the largest eigenvalue of the
// second-moment matrix) of the polyline's segment midpoints, weighted by
// segment length.
Vec2 principal_direction(const Polyline& p);

}  // namespace flowlab
