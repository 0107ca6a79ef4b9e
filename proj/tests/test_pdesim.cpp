#include "rdbc/errors.hpp"
#include "rdbc/pdesim.hpp"
#include "rdbc/spectral.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace rdbc;

namespace {

const PlantParams paper{1.0, 10.0, 5.1};

const KernelSet& paper_set()
{
    static const KernelSet ks = build_kernel_set(paper, 161);
    return ks;
}

RunOptions periodic(double T)
{
    RunOptions o;
    o.mode = ScheduleMode::Periodic;
    o.period = T;
    return o;
}

Eigen::VectorXd advance(const ClosedLoopSystem& sys, Eigen::VectorXd x, int steps)
{
    for (int i = 0; i < steps; ++i) {
        x = sys.step(x, 0.0);
    }
    return x;
}

} // namespace

TEST_SUITE("pdesim") {

TEST_CASE("config validation")
{
    SimConfig c;
    CHECK_NOTHROW(c.validate());
    c.u0 = InitialProfile::polynomial({1.0, 2.0});
    CHECK_THROWS_AS(c.validate(), DomainError);
    c = SimConfig{};
    c.dt = 0.0;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c = SimConfig{};
    c.intervals = 8;
    CHECK_THROWS_AS(c.validate(), DomainError);
    CHECK_THROWS_AS(InitialProfile::tabulated({0.0, 1.0}).on(Grid(161)), DomainError);
}

TEST_CASE("zero data stays zero")
{
    SimConfig c;
    c.horizon = 0.05;
    c.u0 = InitialProfile::polynomial({0.0});
    c.uhat0 = InitialProfile::polynomial({0.0});
    const RunResult r = run(c, paper_set(), periodic(0.01));
    for (std::size_t i = 0; i < r.log.size(); ++i) {
        CHECK(r.log.norm_u[i] == 0.0);
        CHECK(r.log.U[i] == 0.0);
    }
}

TEST_CASE("matched initial data keeps the observer error at zero")
{
    SimConfig c;
    c.horizon = 0.2;
    c.uhat0 = c.u0;
    const RunResult r = run(c, paper_set(), periodic(0.01));
    for (double v : r.log.norm_utilde) {
        CHECK(v <= 1e-13);
    }
}

TEST_CASE("pure diffusion with dissipative boundary decays")
{
    const PlantParams p{1.0, 0.0, 1.0};
    const KernelSet ks = build_kernel_set(p, 64);
    SimConfig c;
    c.params = p;
    c.intervals = 64;
    c.horizon = 0.5;
    c.u0 = InitialProfile::polynomial({0.0, 1.0, -0.5});
    c.uhat0 = c.u0;
    RunOptions o;
    o.mode = ScheduleMode::OpenLoop;
    const RunResult r = run(c, ks, o);
    for (std::size_t i = 1; i < r.log.size(); ++i) {
        CHECK(r.log.norm_u[i] < r.log.norm_u[i - 1]);
    }
}

TEST_CASE("first order in time")
{
    SimConfig c;
    const Grid g(161);
    auto terminal = [&](double dt) {
        c.dt = dt;
        const ClosedLoopSystem sys(c, paper_set());
        const Eigen::VectorXd x0 = sys.initial_state(c.u0.on(g), c.uhat0.on(g));
        return advance(sys, x0, static_cast<int>(std::lround(0.1 / dt)));
    };
    const Eigen::VectorXd ref = terminal(1e-3 / 64);
    const double e1 = (terminal(1e-3) - ref).norm();
    const double e2 = (terminal(5e-4) - ref).norm();
    CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("single steps")
{
    SimConfig c;
    const ClosedLoopSystem sys(c, paper_set());
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(sys.unknowns());
    const Eigen::VectorXd kicked = sys.step(zero, 1.0);
    CHECK(kicked(160) != 0.0);
    CHECK(kicked(321) != 0.0);

    const Grid g(161);
    const Eigen::VectorXd x0 = sys.initial_state(c.u0.on(g), c.uhat0.on(g));
    c.dt = 5e-4;
    const ClosedLoopSystem half(c, paper_set());
    const double big = (sys.step(x0, 0.0) - x0).norm();
    const double small = (half.step(x0, 0.0) - x0).norm();
    CHECK(big / small == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("measurements")
{
    SimConfig c;
    const ClosedLoopSystem sys(c, paper_set());
    const Grid g(161);
    Eigen::VectorXd x = Eigen::VectorXd::Ones(sys.unknowns());
    Measurement m = sys.measure(x);
    CHECK(m.norm_u == doctest::Approx(1.0).epsilon(g.step()));
    CHECK(m.norm_utilde == 0.0);

    const GridFunction lin = sample(g, [](double t) { return t; });
    const GridFunction quad = sample(g, [](double t) { return t * t; });
    x = sys.initial_state(lin, quad);
    m = sys.measure(x);
    CHECK(m.u_at_1 == doctest::Approx(1.0));
    for (int i = 0; i < g.nodes(); ++i) {
        CHECK(m.utilde[i] == m.u[i] - m.uhat[i]);
    }
    x = sys.initial_state(lin, GridFunction(g.nodes(), 0.0));
    CHECK(sys.measure(x).norm_utilde_x == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("runs are deterministic")
{
    SimConfig c;
    c.horizon = 0.2;
    RunOptions o;
    o.trigger.rho = 3.542;
    o.trigger.betas = {1.51, 0.218, 13.3};
    const RunResult a = run(c, paper_set(), o);
    const RunResult b = run(c, paper_set(), o);
    CHECK(a.log.norm_u == b.log.norm_u);
    CHECK(a.log.m == b.log.m);
    CHECK(a.events == b.events);
}

TEST_CASE("schedules off the step grid are rejected")
{
    SimConfig c;
    c.horizon = 0.1;
    CHECK_THROWS_AS(run(c, paper_set(), periodic(1.5e-3)), DomainError);
}

TEST_CASE("open loop is unstable for the paper parameters")
{
    SimConfig c;
    RunOptions o;
    o.mode = ScheduleMode::OpenLoop;
    const RunResult r = run(c, paper_set(), o);
    CHECK(r.log.norm_u.back() > r.log.norm_u.front());
    CHECK(r.events.empty());
}

TEST_CASE("tridiagonal solver matches a dense solve")
{
    const int n = 7;
    std::vector<double> lo(n), di(n), up(n), rhs(n);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
        lo[i] = i > 0 ? -1.0 - 0.1 * i : 0.0;
        up[i] = i + 1 < n ? -0.7 : 0.0;
        di[i] = 4.0 + i;
        rhs[i] = b(i) = std::sin(i + 1.0);
        A(i, i) = di[i];
        if (i > 0) {
            A(i, i - 1) = lo[i];
        }
        if (i + 1 < n) {
            A(i, i + 1) = up[i];
        }
    }
    solve_tridiagonal(lo, di, up, rhs);
    const Eigen::VectorXd x = A.lu().solve(b);
    for (int i = 0; i < n; ++i) {
        CHECK(rhs[i] == doctest::Approx(x(i)).epsilon(1e-14));
    }
}

TEST_CASE("error target system decays at the first Robin eigenvalue")
{
    const double nu = sl_root(paper.q, 1);
    const Grid g(322);
    const GridFunction w0 = sample(g, [nu](double x) { return std::sin(nu * x); });
    const ErrorTargetTrace tr = simulate_error_target(paper, 322, 1e-4, 0.1, w0);
    CHECK(tr.norm.back() / tr.norm.front() == doctest::Approx(std::exp(-nu * nu * 0.1)).epsilon(0.01));
}

TEST_CASE("decay fit recovers an exponential rate")
{
    std::vector<double> t, v;
    for (int i = 0; i <= 50; ++i) {
        t.push_back(0.02 * i);
        v.push_back(3.0 * std::exp(-1.7 * t.back()));
    }
    CHECK(fit_decay_rate(t, v) == doctest::Approx(1.7).epsilon(1e-12));
    CHECK_THROWS_AS(fit_decay_rate(std::vector<double>{1.0}, std::vector<double>{1.0}), PreconditionError);
}

}
