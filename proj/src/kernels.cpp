#include "rdbc/kernels.hpp"

#include "rdbc/errors.hpp"
#include "rdbc/specfun.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace rdbc {

AssumptionViolation::AssumptionViolation(double q, double threshold)
    : std::invalid_argument([&] {
          std::ostringstream os;
          os.precision(12);
          os << "Assumption violated: q = " << q << " must exceed lambda/(2 epsilon) = " << threshold;
          return os.str();
      }()),
      q_(q), threshold_(threshold)
{
}

void PlantParams::validate() const
{
    if (!(epsilon > 0.0)) {
        throw DomainError("epsilon must be positive");
    }
    if (!(lambda >= 0.0)) {
        throw DomainError("lambda must be non-negative");
    }
    if (!(q > 0.0)) {
        throw DomainError("q must be positive");
    }
}

void PlantParams::require_assumption() const
{
    if (!satisfies_assumption()) {
        throw AssumptionViolation(q, p10());
    }
}

namespace {

using specfun::g1;
using specfun::g1_prime;
using specfun::g1_second;
using specfun::g1_third;

constexpr double kOrderSlack = 1e-12;

// s = c (a^2 - b^2) with c = lambda/(4 eps); kernels carry the prefactor 2c = lambda/(2 eps).
double quarter_ratio(const PlantParams& p) { return p.lambda / (4.0 * p.epsilon); }

void require_upper(double x, double y, const char* name)
{
    if (x > y + kOrderSlack || x < -kOrderSlack || y > 1.0 + kOrderSlack) {
        std::ostringstream os;
        os << name << " needs 0 <= x <= y <= 1, got x=" << x << " y=" << y;
        throw DomainError(os.str());
    }
}

void require_lower(double x, double y, const char* name)
{
    if (y > x + kOrderSlack || y < -kOrderSlack || x > 1.0 + kOrderSlack) {
        std::ostringstream os;
        os << name << " needs 0 <= y <= x <= 1, got x=" << x << " y=" << y;
        throw DomainError(os.str());
    }
}

// k(y) = -y F(s), s = c (1 - y^2), F(s) = 2 c r g1(s) + 4 c^2 g1'(s); F' and F'' follow termwise.
struct GainSeries {
    double c;
    double r;
    double F(double s) const { return 2.0 * c * r * g1(s) + 4.0 * c * c * g1_prime(s); }
    double dF(double s) const { return 2.0 * c * r * g1_prime(s) + 4.0 * c * c * g1_second(s); }
    double d2F(double s) const { return 2.0 * c * r * g1_second(s) + 4.0 * c * c * g1_third(s); }
};

double triangle_sq_integral(const Eigen::MatrixXd& table, const Grid& grid, bool lower)
{
    const int n = grid.nodes();
    const double h = grid.step();
    std::vector<double> rows(n, 0.0);
    std::vector<double> buf;
    for (int i = 0; i < n; ++i) {
        buf.clear();
        const int j0 = lower ? 0 : i;
        const int j1 = lower ? i : n - 1;
        for (int j = j0; j <= j1; ++j) {
            buf.push_back(table(i, j) * table(i, j));
        }
        rows[i] = trapezoid(buf, h);
    }
    return trapezoid(rows, h);
}

Eigen::MatrixXd tabulate(const Grid& grid, bool lower, double (*f)(double, double, const PlantParams&),
                         const PlantParams& p)
{
    const int n = grid.nodes();
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const int j0 = lower ? 0 : i;
        const int j1 = lower ? i : n - 1;
        for (int j = j0; j <= j1; ++j) {
            t(i, j) = f(grid.x(i), grid.x(j), p);
        }
    }
    return t;
}

KernelNorms norms_from_tables(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Q, const Eigen::MatrixXd& K,
                              const Eigen::MatrixXd& L, const Eigen::MatrixXd& Px, const Eigen::MatrixXd& Qx,
                              const Grid& grid)
{
    KernelNorms n;
    n.Ltilde = 1.0 + std::sqrt(triangle_sq_integral(L, grid, true));
    n.Ktilde = 1.0 + std::sqrt(triangle_sq_integral(K, grid, true));
    n.Ptilde = 1.0 + std::sqrt(triangle_sq_integral(P, grid, false));
    n.Qtilde = 1.0 + std::sqrt(triangle_sq_integral(Q, grid, false));
    n.Px_sq_int = triangle_sq_integral(Px, grid, false);
    n.Qx_sq_int = triangle_sq_integral(Qx, grid, false);
    return n;
}

// Row i of a lower-triangle operator integrates over nodes 0..i, upper over i..M.
Eigen::MatrixXd weighted(const Eigen::MatrixXd& table, double h, bool lower)
{
    const int n = static_cast<int>(table.rows());
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const int j0 = lower ? 0 : i;
        const int j1 = lower ? i : n - 1;
        if (j1 == j0) {
            continue;
        }
        for (int j = j0; j <= j1; ++j) {
            const double wt = (j == j0 || j == j1) ? 0.5 * h : h;
            w(i, j) = table(i, j) * wt;
        }
    }
    return w;
}

GridFunction apply_plus(const Eigen::MatrixXd& w, std::span<const double> f, double sign)
{
    Eigen::Map<const Eigen::VectorXd> v(f.data(), static_cast<Eigen::Index>(f.size()));
    Eigen::VectorXd out = v + sign * (w * v);
    return GridFunction(out.data(), out.data() + out.size());
}

} // namespace

double kernel_P(double x, double y, const PlantParams& p)
{
    require_upper(x, y, "P");
    const double c = quarter_ratio(p);
    return -2.0 * c * x * g1(c * (y * y - x * x));
}

double kernel_Q(double x, double y, const PlantParams& p)
{
    require_upper(x, y, "Q");
    const double c = quarter_ratio(p);
    return -2.0 * c * x * g1(-c * (y * y - x * x));
}

double kernel_K(double x, double y, const PlantParams& p)
{
    require_lower(x, y, "K");
    const double c = quarter_ratio(p);
    return -2.0 * c * y * g1(c * (x * x - y * y));
}

double kernel_L(double x, double y, const PlantParams& p)
{
    require_lower(x, y, "L");
    const double c = quarter_ratio(p);
    return -2.0 * c * y * g1(-c * (x * x - y * y));
}

double kernel_P_x(double x, double y, const PlantParams& p)
{
    require_upper(x, y, "P_x");
    const double c = quarter_ratio(p);
    const double s = c * (y * y - x * x);
    return -2.0 * c * g1(s) + 4.0 * c * c * x * x * g1_prime(s);
}

double kernel_P_y(double x, double y, const PlantParams& p)
{
    require_upper(x, y, "P_y");
    const double c = quarter_ratio(p);
    return -4.0 * c * c * x * y * g1_prime(c * (y * y - x * x));
}

double kernel_Q_x(double x, double y, const PlantParams& p)
{
    require_upper(x, y, "Q_x");
    const double c = quarter_ratio(p);
    const double s = -c * (y * y - x * x);
    return -2.0 * c * g1(s) - 4.0 * c * c * x * x * g1_prime(s);
}

double kernel_K_x(double x, double y, const PlantParams& p)
{
    require_lower(x, y, "K_x");
    const double c = quarter_ratio(p);
    return -4.0 * c * c * x * y * g1_prime(c * (x * x - y * y));
}

double gain_p1(double x, const PlantParams& p)
{
    return -p.epsilon * p.q * kernel_P(x, 1.0, p) - p.epsilon * kernel_P_y(x, 1.0, p);
}

double gain_k(double y, const PlantParams& p)
{
    p.require_assumption();
    return p.r() * kernel_K(1.0, y, p) + kernel_K_x(1.0, y, p);
}

double gain_k_prime(double y, const PlantParams& p)
{
    p.require_assumption();
    require_lower(1.0, y, "k'");
    const GainSeries gs{quarter_ratio(p), p.r()};
    const double s = gs.c * (1.0 - y * y);
    return -gs.F(s) + 2.0 * gs.c * y * y * gs.dF(s);
}

double gain_k_second(double y, const PlantParams& p)
{
    p.require_assumption();
    require_lower(1.0, y, "k''");
    const GainSeries gs{quarter_ratio(p), p.r()};
    const double s = gs.c * (1.0 - y * y);
    return 6.0 * gs.c * y * gs.dF(s) - 4.0 * gs.c * gs.c * y * y * y * gs.d2F(s);
}

GridFunction gain_g(const PlantParams& p, const Grid& grid)
{
    const GridFunction p1 = sample(grid, [&](double x) { return gain_p1(x, p); });
    GridFunction g(grid.nodes());
    std::vector<double> buf;
    for (int i = 0; i < grid.nodes(); ++i) {
        buf.clear();
        for (int j = 0; j <= i; ++j) {
            buf.push_back(kernel_K(grid.x(i), grid.x(j), p) * p1[j]);
        }
        g[i] = p1[i] - trapezoid(buf, grid.step());
    }
    return g;
}

KernelNorms kernel_norms(const PlantParams& p, const Grid& grid)
{
    if (grid.intervals() < 64) {
        throw DomainError("kernel_norms needs at least 64 grid intervals");
    }
    return norms_from_tables(tabulate(grid, false, kernel_P, p), tabulate(grid, false, kernel_Q, p),
                             tabulate(grid, true, kernel_K, p), tabulate(grid, true, kernel_L, p),
                             tabulate(grid, false, kernel_P_x, p), tabulate(grid, false, kernel_Q_x, p), grid);
}

VolterraTransforms::VolterraTransforms(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Q,
                                       const Eigen::MatrixXd& K, const Eigen::MatrixXd& L, double h)
    : wK_(weighted(K, h, true)), wL_(weighted(L, h, true)), wQ_(weighted(Q, h, false)),
      wP_(weighted(P, h, false))
{
}

GridFunction VolterraTransforms::controller_forward(std::span<const double> f) const
{
    return apply_plus(wK_, f, -1.0);
}

GridFunction VolterraTransforms::controller_inverse(std::span<const double> w) const
{
    return apply_plus(wL_, w, 1.0);
}

GridFunction VolterraTransforms::observer_forward(std::span<const double> f) const
{
    return apply_plus(wQ_, f, 1.0);
}

GridFunction VolterraTransforms::observer_inverse(std::span<const double> w) const
{
    return apply_plus(wP_, w, -1.0);
}

KernelSet build_kernel_set(const PlantParams& p, int intervals)
{
    p.validate();
    p.require_assumption();
    if (intervals < 16) {
        throw DomainError("kernel grid needs at least 16 intervals, got " + std::to_string(intervals));
    }

    KernelSet ks;
    ks.params = p;
    ks.grid = Grid(intervals);
    const Grid& grid = ks.grid;
    const double h = grid.step();

    ks.P = tabulate(grid, false, kernel_P, p);
    ks.Q = tabulate(grid, false, kernel_Q, p);
    ks.K = tabulate(grid, true, kernel_K, p);
    ks.L = tabulate(grid, true, kernel_L, p);

    ks.k = sample(grid, [&](double y) { return gain_k(y, p); });
    ks.k_prime = sample(grid, [&](double y) { return gain_k_prime(y, p); });
    ks.k_second = sample(grid, [&](double y) { return gain_k_second(y, p); });
    ks.p1 = sample(grid, [&](double x) { return gain_p1(x, p); });

    ks.g.assign(grid.nodes(), 0.0);
    std::vector<double> buf;
    for (int i = 0; i < grid.nodes(); ++i) {
        buf.clear();
        for (int j = 0; j <= i; ++j) {
            buf.push_back(ks.K(i, j) * ks.p1[j]);
        }
        ks.g[i] = ks.p1[i] - trapezoid(buf, h);
    }

    ks.r = p.r();
    ks.p10 = p.p10();
    ks.norms = norms_from_tables(ks.P, ks.Q, ks.K, ks.L, tabulate(grid, false, kernel_P_x, p),
                                 tabulate(grid, false, kernel_Q_x, p), grid);
    ks.norm_g_sq = std::pow(l2_norm(ks.g, h), 2);
    ks.norm_k = l2_norm(ks.k, h);
    ks.norm_p1 = l2_norm(ks.p1, h);
    ks.transforms = VolterraTransforms(ks.P, ks.Q, ks.K, ks.L, h);
    return ks;
}

} // namespace rdbc
