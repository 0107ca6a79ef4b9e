#include "oracles.hpp"

#include "rdbc/errors.hpp"
#include "rdbc/kernels.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace rdbc;

namespace {

const PlantParams paper{1.0, 10.0, 5.1};

// |a - b| <= tol * max(|b|, 1)
bool close(double a, double b, double tol) { return std::fabs(a - b) <= tol * std::max(std::fabs(b), 1.0); }

double oracle_k(double y, const PlantParams& p)
{
    const double Kx = oracle::richardson([&](double x) { return oracle::K(x, y, p.epsilon, p.lambda); }, 1.0, 1e-2);
    return p.r() * oracle::K(1.0, y, p.epsilon, p.lambda) + Kx;
}

double round_trip_error(const KernelSet& ks, bool controller)
{
    const Grid& g = ks.grid;
    const GridFunction f = sample(g, [](double x) { return std::sin(std::numbers::pi * x) + x * x; });
    const auto& t = ks.transforms;
    const GridFunction back = controller ? t.controller_inverse(t.controller_forward(f))
                                         : t.observer_inverse(t.observer_forward(f));
    double e = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        e = std::max(e, std::fabs(back[i] - f[i]));
    }
    return e;
}

} // namespace

TEST_SUITE("kernels") {

TEST_CASE("boundary and diagonal values")
{
    CHECK(kernel_P(1.0, 1.0, paper) == doctest::Approx(-5.0));
    CHECK(paper.p10() == doctest::Approx(-kernel_P(1.0, 1.0, paper)));
    CHECK(kernel_P(0.0, 0.5, paper) == 0.0);
    CHECK(kernel_K(1.0, 1.0, paper) == doctest::Approx(-5.0));
    for (double x : {0.1, 0.5, 0.9}) {
        CHECK(kernel_K(x, x, paper) == doctest::Approx(-paper.lambda * x / (2 * paper.epsilon)));
        CHECK(kernel_L(x, x, paper) == doctest::Approx(-paper.lambda * x / (2 * paper.epsilon)));
        for (double delta : {1e-3, 1e-6}) {
            CHECK(std::fabs(kernel_K(x, x - delta, paper) + 5.0 * x) < 20.0 * delta);
        }
    }
}

TEST_CASE("values match the Bessel-form oracle")
{
    const double z = std::sqrt(10.0 * (0.64 - 0.09));
    CHECK(kernel_P(0.3, 0.8, paper) == doctest::Approx(-10.0 * 0.3 * oracle::bessel_i1(z) / z).epsilon(1e-13));
    CHECK(kernel_L(0.8, 0.3, paper) == doctest::Approx(-10.0 * 0.3 * oracle::bessel_j1(z) / z).epsilon(1e-13));

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        double a = u(rng), b = u(rng);
        const double lo = std::min(a, b), hi = std::max(a, b);
        CHECK(kernel_P(lo, hi, paper) == doctest::Approx(oracle::P(lo, hi, 1, 10)).epsilon(1e-13));
        CHECK(kernel_Q(lo, hi, paper) == doctest::Approx(oracle::Q(lo, hi, 1, 10)).epsilon(1e-13));
        CHECK(kernel_K(hi, lo, paper) == doctest::Approx(oracle::K(hi, lo, 1, 10)).epsilon(1e-13));
        CHECK(kernel_L(hi, lo, paper) == doctest::Approx(oracle::L(hi, lo, 1, 10)).epsilon(1e-13));
    }
}

TEST_CASE("zero reaction gives zero kernels")
{
    const PlantParams p{1.0, 0.0, 1.0};
    CHECK(kernel_Q(0.2, 0.7, p) == 0.0);
    CHECK(kernel_K(0.7, 0.2, p) == 0.0);
    CHECK(gain_k(0.4, p) == 0.0);
    CHECK(gain_p1(0.4, p) == 0.0);
}

TEST_CASE("wrong triangle is rejected")
{
    CHECK_THROWS_AS(kernel_P(0.8, 0.3, paper), DomainError);
    CHECK_THROWS_AS(kernel_Q(0.8, 0.3, paper), DomainError);
    CHECK_THROWS_AS(kernel_K(0.3, 0.8, paper), DomainError);
    CHECK_THROWS_AS(kernel_L(0.3, 0.8, paper), DomainError);
}

TEST_CASE("closed-form derivatives match Richardson differences")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double h = 1e-2;
    for (int i = 0; i < 50; ++i) {
        double a = u(rng), b = u(rng);
        const double lo = std::min(a, b), hi = std::max(a, b);
        CAPTURE(lo);
        CAPTURE(hi);
        const double Px = oracle::richardson([&](double x) { return oracle::P(x, hi, 1, 10); }, lo, h);
        const double Py = oracle::richardson([&](double y) { return oracle::P(lo, y, 1, 10); }, hi, h);
        const double Qx = oracle::richardson([&](double x) { return oracle::Q(x, hi, 1, 10); }, lo, h);
        const double Kx = oracle::richardson([&](double x) { return oracle::K(x, lo, 1, 10); }, hi, h);
        CHECK(close(kernel_P_x(lo, hi, paper), Px, 1e-6));
        CHECK(close(kernel_P_y(lo, hi, paper), Py, 1e-6));
        CHECK(close(kernel_Q_x(lo, hi, paper), Qx, 1e-6));
        CHECK(close(kernel_K_x(hi, lo, paper), Kx, 1e-6));

        const double y = u(rng);
        CHECK(close(gain_k(y, paper), oracle_k(y, paper), 1e-6));
        const double kp = oracle::richardson([&](double t) { return oracle_k(t, paper); }, y, h);
        CHECK(close(gain_k_prime(y, paper), kp, 1e-6));
        const double kpp = oracle::second_difference([&](double t) { return oracle_k(t, paper); }, y, 1e-2);
        CHECK(close(gain_k_second(y, paper), kpp, 1e-4));
        const double kpp_r = oracle::richardson([&](double t) { return gain_k_prime(t, paper); }, y, h);
        CHECK(close(gain_k_second(y, paper), kpp_r, 1e-6));
    }
}

TEST_CASE("kernel equations hold")
{
    // K_xx - K_yy = (lambda/eps) K and P_xx - P_yy = -(lambda/eps) P inside the triangles.
    const double h = 1e-3;
    for (auto [x, y] : {std::pair{0.7, 0.3}, std::pair{0.9, 0.1}, std::pair{0.5, 0.45}}) {
        auto K = [](double a, double b) { return oracle::K(a, b, 1, 10); };
        const double Kxx = (K(x + h, y) - 2 * K(x, y) + K(x - h, y)) / (h * h);
        const double Kyy = (K(x, y + h) - 2 * K(x, y) + K(x, y - h)) / (h * h);
        CHECK(Kxx - Kyy == doctest::Approx(10.0 * kernel_K(x, y, paper)).epsilon(1e-4));

        auto P = [](double a, double b) { return oracle::P(a, b, 1, 10); };
        const double Pxx = (P(y + h, x) - 2 * P(y, x) + P(y - h, x)) / (h * h);
        const double Pyy = (P(y, x + h) - 2 * P(y, x) + P(y, x - h)) / (h * h);
        CHECK(Pxx - Pyy == doctest::Approx(-10.0 * kernel_P(y, x, paper)).epsilon(1e-4));
    }
}

TEST_CASE("observer gain")
{
    CHECK(gain_p1(0.0, paper) == 0.0);
    const double Py = oracle::richardson([](double y) { return oracle::P(0.5, y, 1, 10); }, 1.0, 1e-2);
    const double fd = -paper.epsilon * paper.q * oracle::P(0.5, 1.0, 1, 10) - paper.epsilon * Py;
    CHECK(gain_p1(0.5, paper) == doctest::Approx(fd).epsilon(1e-6));

    const Grid g(161);
    GridFunction a(g.nodes()), b(g.nodes());
    for (int i = 0; i < g.nodes(); ++i) {
        const double x = g.x(i);
        const double py = oracle::richardson([x](double y) { return oracle::P(x, y, 1, 10); }, 1.0, 1e-2);
        const double v = gain_p1(x, paper);
        const double w = -paper.q * oracle::P(x, 1.0, 1, 10) - py;
        a[i] = v * v;
        b[i] = w * w;
    }
    CHECK(trapezoid(a, g.step()) == doctest::Approx(trapezoid(b, g.step())).epsilon(1e-6));
}

TEST_CASE("control gain at the boundary")
{
    // K(1,1) = -lambda/(2 eps), K_x(1,1) = -2 (lambda/(4 eps))^2.
    const double c = paper.lambda / 4.0;
    CHECK(kernel_K_x(1.0, 1.0, paper) == doctest::Approx(-2.0 * c * c));
    CHECK(gain_k(1.0, paper) == doctest::Approx(0.1 * -5.0 - 2.0 * c * c));
    CHECK(gain_k(1.0, paper) == doctest::Approx(-13.0));
    CHECK_THROWS_AS(gain_k(0.5, PlantParams{1.0, 10.0, 4.9}), AssumptionViolation);
}

TEST_CASE("coupling gain")
{
    const Grid g(161);
    const GridFunction gv = gain_g(paper, g);
    CHECK(gv.front() == 0.0);
    const GridFunction g0 = gain_g(PlantParams{1.0, 0.0, 1.0}, g);
    CHECK(std::all_of(g0.begin(), g0.end(), [](double v) { return v == 0.0; }));
}

TEST_CASE("kernel norms")
{
    const KernelNorms zero = kernel_norms(PlantParams{1.0, 0.0, 1.0}, Grid(64));
    CHECK(zero.Ltilde == 1.0);
    CHECK(zero.Ptilde == 1.0);
    CHECK(zero.Qtilde == 1.0);
    CHECK(zero.Ktilde == 1.0);

    const KernelNorms coarse = kernel_norms(paper, Grid(161));
    const KernelNorms fine = kernel_norms(paper, Grid(322));
    CHECK(coarse.Ltilde == doctest::Approx(fine.Ltilde).epsilon(2e-3));
    CHECK(coarse.Ptilde >= 1.0);
    CHECK_THROWS(kernel_norms(paper, Grid(32)));
}

TEST_CASE("kernel set scalars")
{
    const KernelSet ks = build_kernel_set(paper, 161);
    CHECK(ks.r == doctest::Approx(0.1));
    CHECK(ks.p10 == doctest::Approx(5.0));
    CHECK(ks.K(161, 161) == doctest::Approx(-5.0));
    CHECK(ks.P(5, 2) == 0.0);
    CHECK(ks.K(2, 5) == 0.0);

    try {
        build_kernel_set(PlantParams{1.0, 10.0, 4.9}, 161);
        FAIL("expected AssumptionViolation");
    } catch (const AssumptionViolation& e) {
        CHECK(e.q() == 4.9);
        CHECK(e.threshold() == 5.0);
    }
    CHECK_THROWS_AS(build_kernel_set(paper, 8), DomainError);
}

TEST_CASE("transform round trips converge at second order")
{
    const KernelSet coarse = build_kernel_set(paper, 161);
    const KernelSet fine = build_kernel_set(paper, 322);
    for (bool controller : {true, false}) {
        const double e1 = round_trip_error(coarse, controller);
        const double e2 = round_trip_error(fine, controller);
        CAPTURE(controller);
        CHECK(e1 < 1e-3);
        CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));
    }
}

}
