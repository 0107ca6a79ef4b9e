#pragma once

// Entire function g1(s) = sum_k s^k / (k! (k+1)!) and its derivatives.
//
// g1 covers both first-kind Bessel families without square roots:
//   I1(z)/z = g1( z^2/4) / 2
//   J1(z)/z = g1(-z^2/4) / 2
// so the backstepping kernels, which are analytic in x^2 - y^2, never meet a 0/0 form on the
// diagonal.

namespace rdbc::specfun {

/// Largest |s| accepted by the evaluators.
inline constexpr double kMaxArgument = 1.0e3;

/// d^order/ds^order g1(s) = sum_j s^j / (j! (j+order+1)!). Throws DomainError for |s| > kMaxArgument
/// or a negative order.
double g1_derivative(int order, double s);

inline double g1(double s) { return g1_derivative(0, s); }
inline double g1_prime(double s) { return g1_derivative(1, s); }
inline double g1_second(double s) { return g1_derivative(2, s); }
inline double g1_third(double s) { return g1_derivative(3, s); }

/// Partial sum of the first `terms` series terms, no convergence test. Exposed for truncation studies.
double g1_partial_sum(int order, double s, int terms);

} // namespace rdbc::specfun
