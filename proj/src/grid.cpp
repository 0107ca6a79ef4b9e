#include "rdbc/grid.hpp"

#include "rdbc/errors.hpp"

#include <cmath>
#include <string>

namespace rdbc {

Grid::Grid(int intervals) : intervals_(intervals), h_(0.0)
{
    if (intervals < 1) {
        throw DomainError("grid needs at least one interval, got " + std::to_string(intervals));
    }
    h_ = 1.0 / intervals;
}

GridFunction sample(const Grid& grid, const std::function<double(double)>& f)
{
    GridFunction out(grid.nodes());
    for (int i = 0; i < grid.nodes(); ++i) {
        out[i] = f(grid.x(i));
    }
    return out;
}

double trapezoid(std::span<const double> values, double h)
{
    if (values.size() < 2) {
        return 0.0;
    }
    double sum = 0.5 * (values.front() + values.back());
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
        sum += values[i];
    }
    return sum * h;
}

double l2_norm(std::span<const double> f, double h)
{
    if (f.size() < 2) {
        return 0.0;
    }
    double sum = 0.5 * (f.front() * f.front() + f.back() * f.back());
    for (std::size_t i = 1; i + 1 < f.size(); ++i) {
        sum += f[i] * f[i];
    }
    return std::sqrt(sum * h);
}

double l2_norm_derivative(std::span<const double> f, double h)
{
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < f.size(); ++i) {
        const double slope = (f[i + 1] - f[i]) / h;
        sum += slope * slope;
    }
    return std::sqrt(sum * h);
}

double eval_polynomial(std::span<const double> coeffs, double x)
{
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
        acc = acc * x + *it;
    }
    return acc;
}

} // namespace rdbc
