#pragma once

#include "rdbc/grid.hpp"
#include "rdbc/kernels.hpp"

#include <cstdint>
#include <vector>

namespace rdbc {

/// Bounds on d/dt d^2 in terms of d^2, ||w_hat||^2, w_hat(1)^2 and w_tilde(1)^2.
struct DerivativeBound {
    double rho1 = 0.0;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double alpha3 = 0.0;
};

DerivativeBound lemma5_constants(const KernelSet& ks);

struct Betas {
    double beta1 = 0.0;
    double beta2 = 0.0;
    double beta3 = 0.0;
};

/// beta_i = alpha_i / (gamma (1 - vartheta)). Throws DomainError unless gamma > 0 and 0 < vartheta < 1.
Betas synthesize_betas(const DerivativeBound& alphas, double gamma, double vartheta);

struct LyapunovGains {
    double B = 0.644;
    double kappa1 = 11.0;
    double kappa2 = 1.0e4;
    double kappa3 = 1.0e8;
};

struct Feasibility {
    bool ok = false;
    double margin = 0.0; ///< must be positive for the convergence guarantee
    double rho = 0.0;    ///< eps kappa1 B / 2
    double A_min = 0.0;  ///< lower bound on the observer-error weight of the Lyapunov function
};

/// Infeasible gains are reported through `ok`/`margin`, never adjusted.
Feasibility feasibility_check(const PlantParams& p, double norm_g_sq, const LyapunovGains& gains,
                              const Betas& betas);

/// Parameters consumed by the dynamic trigger at runtime.
struct TriggerParams {
    double eta = 1.0;
    double gamma = 1.0e5;
    double vartheta = 0.1;
    double m0 = -0.5;
    double rho = 0.0;
    Betas betas;
};

/// Quantities the m-ODE reads at one instant.
struct TriggerSignals {
    double d = 0.0;        ///< input holding error
    double w_hat_norm = 0.0;
    double w_hat_at_1 = 0.0;
    double w_tilde_at_1 = 0.0;
};

struct TriggerStep {
    bool fire = false;   ///< d^2 > -gamma m somewhere in the step (strict)
    double m_next = 0.0;
    double m_peak = 0.0; ///< largest m over the sub-steps
};

/// Strict event condition d^2 > -gamma m.
inline bool trigger_fires(double d, double m, double gamma) { return d * d > -gamma * m; }

/// Advances m(t) across one step of length dt.
///
/// The signals are linearly interpolated between `begin` and `end`; m is propagated exactly over
/// `substeps` pieces with the forcing frozen at each piece midpoint, and the event condition is tested
/// at the end of every piece. Throws InvariantViolation if m >= 0 on entry.
TriggerStep trigger_step(double m, const TriggerSignals& begin, const TriggerSignals& end,
                         const TriggerParams& params, double dt, int substeps = 64);

/// Same with signals held constant over the step.
TriggerStep trigger_step(double m, const TriggerSignals& signals, const TriggerParams& params, double dt);

/// Event-trigger state: held input, observer snapshot, dynamic variable and event log.
struct TriggerRuntime {
    double held_input = 0.0;
    GridFunction snapshot;
    double m = 0.0;
    double d = 0.0;
    std::vector<double> event_log;

    void record_event(double t, double input, std::span<const double> observer);
};

/// t_j = j T for all t_j <= horizon. Throws DomainError unless 0 < T <= horizon.
std::vector<double> periodic_schedule(double T, double horizon);

/// Sampling times whose gaps are drawn uniformly from (0, T] and rounded up to multiples of
/// `quantum` (no rounding when quantum <= 0). Deterministic for a given seed.
std::vector<double> jitter_schedule(double T, double horizon, std::uint64_t seed, double quantum = 0.0);

struct DwellStats {
    double min_dwell = 0.0;
    double mean_dwell = 0.0;
    int count = 0; ///< number of inter-event gaps
};

/// Throws PreconditionError with fewer than two events.
DwellStats dwell_stats(const std::vector<double>& events);

} // namespace rdbc
