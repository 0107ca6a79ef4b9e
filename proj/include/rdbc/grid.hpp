#pragma once

#include <functional>
#include <span>
#include <vector>

namespace rdbc {

/// Uniform grid on [0,1] with `intervals` cells and intervals+1 nodes.
class Grid {
public:
    explicit Grid(int intervals);

    int intervals() const noexcept { return intervals_; }
    int nodes() const noexcept { return intervals_ + 1; }
    double step() const noexcept { return h_; }
    double x(int i) const noexcept { return i * h_; }

private:
    int intervals_;
    double h_;
};

/// Real function sampled on the nodes of a Grid.
using GridFunction = std::vector<double>;

GridFunction sample(const Grid& grid, const std::function<double(double)>& f);

/// Composite trapezoid over equally spaced samples with spacing h.
double trapezoid(std::span<const double> values, double h);

/// L2(0,1) norm by trapezoid quadrature.
double l2_norm(std::span<const double> f, double h);

/// L2 norm of the first differences (f[i+1]-f[i])/h, each cell weighted by h.
double l2_norm_derivative(std::span<const double> f, double h);

/// Polynomial with coefficients c[0] + c[1] x + c[2] x^2 + ...
double eval_polynomial(std::span<const double> coeffs, double x);

} // namespace rdbc
