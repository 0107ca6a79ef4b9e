#include "rdbc/errors.hpp"
#include "rdbc/trigger.hpp"

#include <doctest.h>

#include <cmath>

using namespace rdbc;

namespace {

const PlantParams paper{1.0, 10.0, 5.1};

TriggerParams quiet_params(double eta)
{
    TriggerParams p;
    p.eta = eta;
    p.rho = 3.542;
    p.betas = {1.5, 0.2, 13.0};
    return p;
}

} // namespace

TEST_SUITE("trigger") {

TEST_CASE("derivative-bound constants follow from boundary gains")
{
    const KernelSet ks = build_kernel_set(paper, 161);
    const DerivativeBound b = lemma5_constants(ks);
    // k(1) = -13 and k'(1) = -13 + 5 (0.25 + 25/6) for these parameters.
    const double k1 = -13.0;
    const double kp1 = -13.0 + 5.0 * (0.25 + 25.0 / 6.0);
    CHECK(ks.k.back() == doctest::Approx(k1).epsilon(1e-14));
    CHECK(ks.k_prime.back() == doctest::Approx(kp1).epsilon(1e-13));
    CHECK(b.rho1 == doctest::Approx(6.0 * k1 * k1));
    CHECK(b.alpha2 == doctest::Approx(6.0 * std::pow(5.1 * k1 + kp1, 2)).epsilon(1e-13));

    const KernelSet flat = build_kernel_set(PlantParams{1.0, 0.0, 1.0}, 161);
    const DerivativeBound z = lemma5_constants(flat);
    CHECK(z.rho1 == 0.0);
    CHECK(z.alpha1 == 0.0);
    CHECK(z.alpha2 == 0.0);
    CHECK(z.alpha3 == 0.0);
}

TEST_CASE("beta synthesis")
{
    const DerivativeBound a{0.0, 1.3511e3, 1.9642e2, 1.1956e4};
    const Betas b = synthesize_betas(a, 1e5, 0.1);
    CHECK(b.beta1 == doctest::Approx(0.015).epsilon(0.01));
    CHECK(b.beta2 == doctest::Approx(0.0022).epsilon(0.01));
    CHECK(b.beta3 == doctest::Approx(0.1328).epsilon(0.01));
    CHECK(b.beta1 * 1e5 * 0.9 == doctest::Approx(a.alpha1).epsilon(1e-15));
    CHECK(synthesize_betas(a, 1e300, 0.1).beta3 < 1e-290);
    CHECK_THROWS_AS(synthesize_betas(a, 1e5, 1.0), DomainError);
    CHECK_THROWS_AS(synthesize_betas(a, 1e5, 0.0), DomainError);
    CHECK_THROWS_AS(synthesize_betas(a, 0.0, 0.5), DomainError);
}

TEST_CASE("feasibility")
{
    const LyapunovGains gains;
    const Betas paper_betas{0.015, 0.0022, 0.1328};
    const Feasibility f = feasibility_check(paper, 3.0042e4, gains, paper_betas);
    // 0.644 (0.1 - 1/22 - 10/4e4 - 3.0042e4/1e8) - 0.03 - 0.0022
    const double margin = 0.644 * (0.1 - 1.0 / 22.0 - 10.0 / 4e4 - 3.0042e4 / 1e8) - 2 * 0.015 - 0.0022;
    CHECK(f.ok);
    CHECK(f.margin == doctest::Approx(margin).epsilon(1e-12));
    CHECK(f.margin == doctest::Approx(0.0025728).epsilon(1e-4));
    CHECK(f.rho == doctest::Approx(3.54).epsilon(0.005));
    CHECK(f.A_min == doctest::Approx((10 * 1e4 * 0.644 + 2e8 * 0.644 + 4 * 0.1328) / 5.1));

    LyapunovGains none = gains;
    none.B = 0.0;
    const Feasibility g = feasibility_check(paper, 3.0042e4, none, paper_betas);
    CHECK_FALSE(g.ok);
    CHECK(g.margin == doctest::Approx(-2 * 0.015 - 0.0022));
}

TEST_CASE("quiet step is pure decay")
{
    TriggerParams p = quiet_params(1.0);
    const TriggerStep s = trigger_step(-0.5, TriggerSignals{}, p, 1e-3);
    CHECK_FALSE(s.fire);
    CHECK(s.m_next == doctest::Approx(-0.4995).epsilon(1e-6));
    CHECK(s.m_next == doctest::Approx(-0.5 * std::exp(-1e-3)).epsilon(1e-15));
}

TEST_CASE("constant forcing follows the exact solution")
{
    TriggerParams p = quiet_params(3.0);
    const TriggerSignals sig{0.02, 0.1, 0.05, 0.01};
    const double F = p.rho * 0.02 * 0.02 - (1.5 * 0.01 + 0.2 * 0.0025 + 13.0 * 0.0001);
    const double dt = 0.01;
    const double exact = std::exp(-3.0 * dt) * -0.5 + (1 - std::exp(-3.0 * dt)) / 3.0 * F;
    CHECK(trigger_step(-0.5, sig, p, dt).m_next == doctest::Approx(exact).epsilon(1e-13));
}

TEST_CASE("tie does not fire")
{
    CHECK_FALSE(trigger_fires(2.0, -1.0, 4.0));
    CHECK(trigger_fires(2.0 + 1e-12, -1.0, 4.0));
    CHECK_FALSE(trigger_fires(0.0, -1e-300, 1e5));
}

TEST_CASE("large holding error fires")
{
    TriggerParams p = quiet_params(1.0);
    TriggerSignals sig;
    sig.d = 1.0;
    CHECK(trigger_step(-1e-6, sig, p, 1e-3).fire);
}

TEST_CASE("non-negative m on entry is an invariant violation")
{
    CHECK_THROWS_AS(trigger_step(0.0, TriggerSignals{}, quiet_params(1.0), 1e-3), InvariantViolation);
}

TEST_CASE("periodic schedule")
{
    const auto t = periodic_schedule(8e-4, 0.1);
    CHECK(t.size() == 126);
    CHECK(t.front() == 0.0);
    CHECK_THROWS_AS(periodic_schedule(0.0, 0.1), DomainError);
    CHECK_THROWS_AS(periodic_schedule(0.2, 0.1), DomainError);
}

TEST_CASE("jitter schedule")
{
    const auto a = jitter_schedule(1e-3, 0.5, 42);
    const auto b = jitter_schedule(1e-3, 0.5, 42);
    CHECK(a == b);
    CHECK(a != jitter_schedule(1e-3, 0.5, 43));
    for (std::size_t i = 1; i < a.size(); ++i) {
        CHECK(a[i] - a[i - 1] > 0.0);
        CHECK(a[i] - a[i - 1] <= 1e-3);
    }
    const double quantum = 2.5e-4;
    const auto q = jitter_schedule(1e-3, 0.5, 7, quantum);
    for (std::size_t i = 1; i < q.size(); ++i) {
        const double gap = q[i] - q[i - 1];
        CHECK(gap <= 1e-3 + 1e-15);
        CHECK(std::fabs(q[i] / quantum - std::round(q[i] / quantum)) < 1e-9);
    }
    CHECK_THROWS_AS(jitter_schedule(1e-3, 0.5, 1, 2e-3), DomainError);
}

TEST_CASE("dwell statistics")
{
    const DwellStats s = dwell_stats({0.0, 0.01, 0.03});
    CHECK(s.min_dwell == doctest::Approx(0.01));
    CHECK(s.mean_dwell == doctest::Approx(0.015));
    CHECK(s.count == 2);
    CHECK_THROWS_AS(dwell_stats({0.0}), PreconditionError);
}

TEST_CASE("runtime records events")
{
    TriggerRuntime rt;
    rt.d = 0.3;
    const double snap[] = {0.0, 1.0, 2.0};
    rt.record_event(0.5, 1.25, snap);
    CHECK(rt.held_input == 1.25);
    CHECK(rt.d == 0.0);
    CHECK(rt.snapshot.size() == 3);
    CHECK(rt.event_log == std::vector<double>{0.5});
}

}
