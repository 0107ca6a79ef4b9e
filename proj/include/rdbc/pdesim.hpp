#pragma once

#include "rdbc/grid.hpp"
#include "rdbc/kernels.hpp"
#include "rdbc/trigger.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rdbc {

/// Initial profile given by polynomial coefficients or by values on the simulation grid.
class InitialProfile {
public:
    InitialProfile() = default;
    static InitialProfile polynomial(std::vector<double> coeffs);
    static InitialProfile tabulated(GridFunction values);

    /// Samples the profile; throws DomainError if tabulated values do not match the grid.
    GridFunction on(const Grid& grid) const;
    bool is_polynomial() const noexcept { return polynomial_; }
    const std::vector<double>& data() const noexcept { return data_; }

private:
    bool polynomial_ = true;
    std::vector<double> data_;
};

/// 10 x^2 (x-1)^2
InitialProfile paper_plant_profile();
/// 15 x^2 (x-1)^2 + 15 x^3 (x-1)^3
InitialProfile paper_observer_profile();

struct SimConfig {
    PlantParams params;
    int intervals = 161;
    double dt = 1.0e-3;
    double horizon = 1.0;
    InitialProfile u0 = paper_plant_profile();
    InitialProfile uhat0 = paper_observer_profile();

    /// Throws DomainError naming the violated constraint.
    void validate() const;
};

struct Measurement {
    double norm_u = 0.0;
    double norm_uhat = 0.0;
    double norm_utilde = 0.0;
    double norm_utilde_x = 0.0;
    double u_at_1 = 0.0;
    double uhat_at_1 = 0.0;
    GridFunction u;
    GridFunction uhat;
    GridFunction utilde;
};

/// Plant and observer discretized on one grid and stepped together by implicit Euler.
///
/// Unknowns are the nodes x_1..x_M of u followed by those of u_hat (x_0 = 0 is Dirichlet). The Robin
/// conditions at x = 1 are folded in through a ghost node. The matrix I - dt A is factored once.
class ClosedLoopSystem {
public:
    ClosedLoopSystem(const SimConfig& cfg, const KernelSet& ks);

    int unknowns() const noexcept { return 2 * grid_.intervals(); }
    const Grid& grid() const noexcept { return grid_; }
    double dt() const noexcept { return dt_; }

    Eigen::VectorXd initial_state(std::span<const double> u0, std::span<const double> uhat0) const;
    /// One implicit Euler step with the input held at `input`.
    Eigen::VectorXd step(const Eigen::VectorXd& state, double input) const;
    Measurement measure(const Eigen::VectorXd& state) const;

    /// Continuous-time law int_0^1 k(y) u_hat(y) dy.
    double control_law(std::span<const double> uhat) const;

    const Eigen::MatrixXd& generator() const noexcept { return A_; }
    const Eigen::VectorXd& input_column() const noexcept { return b_; }

private:
    Grid grid_;
    double dt_;
    GridFunction k_;
    Eigen::MatrixXd A_;
    Eigen::VectorXd b_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

enum class ScheduleMode { Event, Periodic, Jitter, OpenLoop };

ScheduleMode parse_schedule_mode(const std::string& name);
std::string to_string(ScheduleMode mode);

struct RunOptions {
    ScheduleMode mode = ScheduleMode::Event;
    TriggerParams trigger;
    double period = 0.0;       ///< diameter for periodic/jitter modes
    std::uint64_t seed = 1;    ///< jitter schedule seed
    int trigger_substeps = 64;
    int snapshot_every = 0;    ///< 0 disables profile snapshots
};

/// Closed-loop trajectory, one row per time step.
struct TrajectoryLog {
    std::vector<double> t;
    std::vector<double> norm_u;
    std::vector<double> norm_uhat;
    std::vector<double> norm_utilde;
    std::vector<double> norm_utilde_x;
    std::vector<double> U;
    std::vector<double> d;
    std::vector<double> m; ///< NaN outside event mode
    std::vector<int> event;

    std::size_t size() const noexcept { return t.size(); }
    void reserve(std::size_t n);
};

struct Snapshot {
    double t = 0.0;
    GridFunction u;
    GridFunction uhat;
};

struct TriggerDiagnostics {
    int m_nonnegative = 0;     ///< steps where m reached zero or above (any sub-step)
    int threshold_exceeded = 0; ///< logged steps with d^2 > -gamma m after the event decision
    int late_events = 0;       ///< events placed at a step end because the start already fired
    double max_m = 0.0;        ///< largest logged m
};

struct RunResult {
    TrajectoryLog log;
    std::vector<double> events;
    std::vector<Snapshot> snapshots;
    TriggerDiagnostics diagnostics;
};

/// Simulates the closed loop under the chosen scheduler.
///
/// Event mode: the trigger is consulted once per step. When the event condition would be met inside
/// (t_n, t_{n+1}] the input is refreshed at t_n and the step recomputed; if t_n already carries an event,
/// the event is placed at t_{n+1}. Periodic and jitter schedules must land on the dt grid.
RunResult run(const SimConfig& cfg, const KernelSet& ks, const RunOptions& opts);

/// Least-squares decay rate of log(values) against time; non-positive values are skipped.
double fit_decay_rate(std::span<const double> times, std::span<const double> values);

/// Solves a tridiagonal system in place (Thomas algorithm). `rhs` becomes the solution.
void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<double> rhs);

struct ErrorTargetTrace {
    std::vector<double> t;
    std::vector<double> norm;
};

/// Implicit Euler on w_t = eps w_xx, w(0) = 0, w_x(1) = -q w(1); records ||w|| every step.
ErrorTargetTrace simulate_error_target(const PlantParams& p, int intervals, double dt, double horizon,
                                       std::span<const double> w0);

} // namespace rdbc
