#include "rdbc/trigger.hpp"

#include "rdbc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace rdbc {

DerivativeBound lemma5_constants(const KernelSet& ks)
{
    const PlantParams& p = ks.params;
    const double eps = p.epsilon;
    const double h = ks.grid.step();
    const int last = ks.grid.intervals();

    const double k1 = ks.k[last];
    const double kp1 = ks.k_prime[last];

    std::vector<double> integrand(ks.grid.nodes());
    for (int i = 0; i < ks.grid.nodes(); ++i) {
        const double v = eps * ks.k_second[i] + eps * k1 * ks.k[i] + p.lambda * ks.k[i];
        integrand[i] = v * v;
    }
    const double shaped = trapezoid(integrand, h);

    for (int j = 0; j < ks.grid.nodes(); ++j) {
        integrand[j] = ks.L(last, j) * ks.L(last, j);
    }
    const double L_row_sq = trapezoid(integrand, h);

    for (int j = 0; j < ks.grid.nodes(); ++j) {
        integrand[j] = ks.k[j] * ks.p1[j];
    }
    const double k_p1 = trapezoid(integrand, h);

    const double boundary = eps * p.q * k1 + eps * kp1;
    const double Lt = ks.norms.Ltilde;

    DerivativeBound b;
    b.rho1 = 6.0 * eps * eps * k1 * k1;
    b.alpha1 = 3.0 * Lt * Lt * shaped + 6.0 * boundary * boundary * L_row_sq;
    b.alpha2 = 6.0 * boundary * boundary;
    b.alpha3 = 6.0 * std::pow(0.5 * p.lambda * k1 + k_p1, 2);
    return b;
}

Betas synthesize_betas(const DerivativeBound& alphas, double gamma, double vartheta)
{
    if (!(gamma > 0.0)) {
        throw DomainError("gamma must be positive");
    }
    if (!(vartheta > 0.0 && vartheta < 1.0)) {
        throw DomainError("vartheta must lie in (0, 1)");
    }
    const double scale = gamma * (1.0 - vartheta);
    return {alphas.alpha1 / scale, alphas.alpha2 / scale, alphas.alpha3 / scale};
}

Feasibility feasibility_check(const PlantParams& p, double norm_g_sq, const LyapunovGains& gains,
                              const Betas& betas)
{
    const double eps = p.epsilon;
    Feasibility f;
    f.margin = gains.B * (eps * std::min(p.r(), 0.5) - eps / (2.0 * gains.kappa1) -
                          p.lambda / (4.0 * gains.kappa2) - norm_g_sq / gains.kappa3) -
               2.0 * betas.beta1 - betas.beta2;
    f.ok = f.margin > 0.0;
    f.rho = eps * gains.kappa1 * gains.B / 2.0;
    f.A_min = (p.lambda * gains.kappa2 * gains.B + 2.0 * gains.kappa3 * gains.B + 4.0 * betas.beta3) / (eps * p.q);
    return f;
}

namespace {

double drain(const TriggerSignals& s, const Betas& b)
{
    return b.beta1 * s.w_hat_norm * s.w_hat_norm + b.beta2 * s.w_hat_at_1 * s.w_hat_at_1 +
           b.beta3 * s.w_tilde_at_1 * s.w_tilde_at_1;
}

} // namespace

TriggerStep trigger_step(double m, const TriggerSignals& begin, const TriggerSignals& end,
                         const TriggerParams& params, double dt, int substeps)
{
    if (!(m < 0.0)) {
        std::ostringstream os;
        os << "dynamic trigger variable must be negative on entry, got m = " << m;
        throw InvariantViolation(os.str());
    }
    const double piece = dt / substeps;
    const double decay = std::exp(-params.eta * piece);
    // (1 - e^{-eta tau}) / eta, written to stay accurate for small eta tau.
    const double gain = -std::expm1(-params.eta * piece) / params.eta;
    const double drain0 = drain(begin, params.betas);
    const double drain1 = drain(end, params.betas);

    TriggerStep out;
    out.m_peak = m;
    double mm = m;
    for (int j = 0; j < substeps; ++j) {
        const double mid = (j + 0.5) / substeps;
        const double d_mid = begin.d + (end.d - begin.d) * mid;
        const double forcing = params.rho * d_mid * d_mid - (drain0 + (drain1 - drain0) * mid);
        mm = decay * mm + gain * forcing;
        out.m_peak = std::max(out.m_peak, mm);
        const double d_end = begin.d + (end.d - begin.d) * (j + 1.0) / substeps;
        if (trigger_fires(d_end, mm, params.gamma)) {
            out.fire = true;
        }
    }
    out.m_next = mm;
    return out;
}

TriggerStep trigger_step(double m, const TriggerSignals& signals, const TriggerParams& params, double dt)
{
    return trigger_step(m, signals, signals, params, dt);
}

void TriggerRuntime::record_event(double t, double input, std::span<const double> observer)
{
    held_input = input;
    snapshot.assign(observer.begin(), observer.end());
    d = 0.0;
    event_log.push_back(t);
}

std::vector<double> periodic_schedule(double T, double horizon)
{
    if (!(T > 0.0) || !(T <= horizon)) {
        throw DomainError("periodic schedule needs 0 < T <= horizon");
    }
    const auto last = static_cast<long>(std::floor(horizon / T * (1.0 + 1e-12)));
    std::vector<double> out;
    out.reserve(last + 1);
    for (long j = 0; j <= last; ++j) {
        out.push_back(j * T);
    }
    return out;
}

std::vector<double> jitter_schedule(double T, double horizon, std::uint64_t seed, double quantum)
{
    if (!(T > 0.0) || !(T <= horizon)) {
        throw DomainError("jitter schedule needs 0 < T <= horizon");
    }
    if (quantum > T) {
        throw DomainError("jitter quantum exceeds the diameter");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> gap(0.0, T);
    std::vector<double> out{0.0};
    if (quantum > 0.0) {
        // Work in whole quanta so event times stay exact multiples of the quantum.
        const auto max_q = static_cast<long>(std::floor(T / quantum * (1.0 + 1e-12)));
        std::uniform_int_distribution<long> pick(1, max_q);
        long at = 0;
        while (true) {
            at += pick(rng);
            const double t = at * quantum;
            if (t > horizon * (1.0 + 1e-12)) {
                break;
            }
            out.push_back(t);
        }
        return out;
    }
    double t = 0.0;
    while (true) {
        double g = gap(rng);
        if (g <= 0.0) {
            g = T;
        }
        t += g;
        if (t > horizon) {
            break;
        }
        out.push_back(t);
    }
    return out;
}

DwellStats dwell_stats(const std::vector<double>& events)
{
    if (events.size() < 2) {
        throw PreconditionError("dwell statistics need at least two events");
    }
    DwellStats s;
    s.count = static_cast<int>(events.size()) - 1;
    s.min_dwell = events[1] - events[0];
    double sum = 0.0;
    for (std::size_t i = 1; i < events.size(); ++i) {
        const double gap = events[i] - events[i - 1];
        s.min_dwell = std::min(s.min_dwell, gap);
        sum += gap;
    }
    s.mean_dwell = sum / s.count;
    return s;
}

} // namespace rdbc
