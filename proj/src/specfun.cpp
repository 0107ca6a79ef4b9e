#include "rdbc/specfun.hpp"

#include "rdbc/errors.hpp"

#include <cmath>
#include <string>

namespace rdbc::specfun {

namespace {

// Below this the alternating series loses more than ~1e-13 to cancellation; switch to J_{o+1}.
constexpr double kSeriesFloor = -16.0;
constexpr int kMaxTerms = 400;
constexpr double kRelTol = 1.0e-16;

double leading_term(int order)
{
    // 1/(order+1)!
    double f = 1.0;
    for (int i = 2; i <= order + 1; ++i) {
        f *= i;
    }
    return 1.0 / f;
}

void check_args(int order, double s)
{
    if (order < 0) {
        throw DomainError("g1 derivative order must be non-negative");
    }
    if (!(std::fabs(s) <= kMaxArgument)) {
        throw DomainError("g1 argument |s| = " + std::to_string(std::fabs(s)) +
                          " exceeds bound; check lambda/epsilon");
    }
}

} // namespace

double g1_partial_sum(int order, double s, int terms)
{
    check_args(order, s);
    double term = leading_term(order);
    double sum = 0.0;
    for (int j = 0; j < terms; ++j) {
        sum += term;
        term *= s / ((j + 1.0) * (j + order + 2.0));
    }
    return sum;
}

double g1_derivative(int order, double s)
{
    check_args(order, s);
    if (s < kSeriesFloor) {
        const double root = std::sqrt(-s);
        return std::cyl_bessel_j(order + 1.0, 2.0 * root) / std::pow(root, order + 1);
    }

    double term = leading_term(order);
    double sum = 0.0;
    for (int j = 0; j < kMaxTerms; ++j) {
        sum += term;
        term *= s / ((j + 1.0) * (j + order + 2.0));
        // Once the ratio is below one the terms shrink monotonically.
        const bool past_peak = std::fabs(s) < (j + 1.0) * (j + order + 2.0);
        if (past_peak && std::fabs(term) <= kRelTol * std::fabs(sum)) {
            break;
        }
    }
    return sum;
}

} // namespace rdbc::specfun
