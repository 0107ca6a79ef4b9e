#include "rdbc/pdesim.hpp"

#include "rdbc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace rdbc {

InitialProfile InitialProfile::polynomial(std::vector<double> coeffs)
{
    InitialProfile p;
    p.polynomial_ = true;
    p.data_ = std::move(coeffs);
    return p;
}

InitialProfile InitialProfile::tabulated(GridFunction values)
{
    InitialProfile p;
    p.polynomial_ = false;
    p.data_ = std::move(values);
    return p;
}

GridFunction InitialProfile::on(const Grid& grid) const
{
    if (polynomial_) {
        return sample(grid, [this](double x) { return eval_polynomial(data_, x); });
    }
    if (static_cast<int>(data_.size()) != grid.nodes()) {
        throw DomainError("tabulated profile has " + std::to_string(data_.size()) + " values, grid has " +
                          std::to_string(grid.nodes()) + " nodes");
    }
    return data_;
}

InitialProfile paper_plant_profile()
{
    return InitialProfile::polynomial({0.0, 0.0, 10.0, -20.0, 10.0});
}

InitialProfile paper_observer_profile()
{
    return InitialProfile::polynomial({0.0, 0.0, 15.0, -45.0, 60.0, -45.0, 15.0});
}

void SimConfig::validate() const
{
    params.validate();
    if (intervals < 16) {
        throw DomainError("simulation grid needs at least 16 intervals");
    }
    if (!(dt > 0.0)) {
        throw DomainError("dt must be positive");
    }
    if (!(horizon >= dt)) {
        throw DomainError("horizon must be at least one time step");
    }
    const Grid grid(intervals);
    if (u0.on(grid).front() != 0.0 || uhat0.on(grid).front() != 0.0) {
        throw DomainError("initial profiles must vanish at x = 0");
    }
}

ClosedLoopSystem::ClosedLoopSystem(const SimConfig& cfg, const KernelSet& ks)
    : grid_(cfg.intervals), dt_(cfg.dt), k_(ks.k)
{
    if (ks.grid.intervals() != cfg.intervals) {
        throw DomainError("kernel set and simulation grid differ");
    }
    const PlantParams& p = cfg.params;
    const int M = grid_.intervals();
    const int n = 2 * M;
    const double h = grid_.step();
    const double diff = p.epsilon / (h * h);
    const double ghost = 2.0 * p.epsilon / h;

    A_ = Eigen::MatrixXd::Zero(n, n);
    b_ = Eigen::VectorXd::Zero(n);
    for (int block = 0; block < 2; ++block) {
        const int off = block * M;
        for (int i = 1; i <= M; ++i) {
            const int row = off + i - 1;
            A_(row, row) += -2.0 * diff + p.lambda;
            if (i > 1) {
                A_(row, row - 1) += diff;
            }
            if (i < M) {
                A_(row, row + 1) += diff;
            } else {
                // u_{M+1} = u_{M-1} + 2h (U - q u_M)
                A_(row, row - 1) += diff;
                A_(row, row) += -ghost * p.q;
                b_(row) = ghost;
            }
        }
    }
    const int uM = M - 1;
    const int uhM = n - 1;
    for (int i = 1; i <= M; ++i) {
        A_(M + i - 1, uM) += ks.p1[i];
        A_(M + i - 1, uhM) -= ks.p1[i];
    }
    A_(uhM, uM) += ghost * ks.p10;
    A_(uhM, uhM) -= ghost * ks.p10;

    const Eigen::MatrixXd implicit = Eigen::MatrixXd::Identity(n, n) - dt_ * A_;
    lu_.compute(implicit);
    if (!(lu_.rcond() > 1e-14)) {
        throw DomainError("implicit Euler matrix is singular");
    }
}

Eigen::VectorXd ClosedLoopSystem::initial_state(std::span<const double> u0, std::span<const double> uhat0) const
{
    const int M = grid_.intervals();
    Eigen::VectorXd x(2 * M);
    for (int i = 1; i <= M; ++i) {
        x(i - 1) = u0[i];
        x(M + i - 1) = uhat0[i];
    }
    return x;
}

Eigen::VectorXd ClosedLoopSystem::step(const Eigen::VectorXd& state, double input) const
{
    return lu_.solve(state + dt_ * input * b_);
}

Measurement ClosedLoopSystem::measure(const Eigen::VectorXd& state) const
{
    const int M = grid_.intervals();
    const double h = grid_.step();
    Measurement m;
    m.u.assign(M + 1, 0.0);
    m.uhat.assign(M + 1, 0.0);
    m.utilde.assign(M + 1, 0.0);
    for (int i = 1; i <= M; ++i) {
        m.u[i] = state(i - 1);
        m.uhat[i] = state(M + i - 1);
        m.utilde[i] = m.u[i] - m.uhat[i];
    }
    m.norm_u = l2_norm(m.u, h);
    m.norm_uhat = l2_norm(m.uhat, h);
    m.norm_utilde = l2_norm(m.utilde, h);
    m.norm_utilde_x = l2_norm_derivative(m.utilde, h);
    m.u_at_1 = m.u[M];
    m.uhat_at_1 = m.uhat[M];
    return m;
}

double ClosedLoopSystem::control_law(std::span<const double> uhat) const
{
    double acc = 0.5 * (k_.front() * uhat.front() + k_.back() * uhat.back());
    for (std::size_t i = 1; i + 1 < k_.size(); ++i) {
        acc += k_[i] * uhat[i];
    }
    return acc * grid_.step();
}

ScheduleMode parse_schedule_mode(const std::string& name)
{
    if (name == "event") {
        return ScheduleMode::Event;
    }
    if (name == "periodic") {
        return ScheduleMode::Periodic;
    }
    if (name == "jitter") {
        return ScheduleMode::Jitter;
    }
    if (name == "open" || name == "open-loop") {
        return ScheduleMode::OpenLoop;
    }
    throw ConfigError("unknown mode '" + name + "' (expected event, periodic, jitter or open)");
}

std::string to_string(ScheduleMode mode)
{
    switch (mode) {
    case ScheduleMode::Event: return "event";
    case ScheduleMode::Periodic: return "periodic";
    case ScheduleMode::Jitter: return "jitter";
    case ScheduleMode::OpenLoop: return "open";
    }
    return "unknown";
}

void TrajectoryLog::reserve(std::size_t n)
{
    for (auto* v : {&t, &norm_u, &norm_uhat, &norm_utilde, &norm_utilde_x, &U, &d, &m}) {
        v->reserve(n);
    }
    event.reserve(n);
}

namespace {

struct Observed {
    Measurement meas;
    TriggerSignals signals;
};

Observed observe(const ClosedLoopSystem& sys, const KernelSet& ks, const Eigen::VectorXd& state, double held)
{
    Observed o;
    o.meas = sys.measure(state);
    const GridFunction w_hat = ks.transforms.controller_forward(o.meas.uhat);
    const GridFunction w_tilde = ks.transforms.observer_forward(o.meas.utilde);
    o.signals.d = held - sys.control_law(o.meas.uhat);
    o.signals.w_hat_norm = l2_norm(w_hat, sys.grid().step());
    o.signals.w_hat_at_1 = w_hat.back();
    o.signals.w_tilde_at_1 = w_tilde.back();
    return o;
}

void append(TrajectoryLog& log, double t, const Measurement& m, double U, double d, double mvar, bool event)
{
    log.t.push_back(t);
    log.norm_u.push_back(m.norm_u);
    log.norm_uhat.push_back(m.norm_uhat);
    log.norm_utilde.push_back(m.norm_utilde);
    log.norm_utilde_x.push_back(m.norm_utilde_x);
    log.U.push_back(U);
    log.d.push_back(d);
    log.m.push_back(mvar);
    log.event.push_back(event ? 1 : 0);
}

std::set<long> schedule_steps(const std::vector<double>& times, double dt)
{
    std::set<long> steps;
    for (double t : times) {
        const long idx = std::lround(t / dt);
        if (std::fabs(idx * dt - t) > 1e-9 * std::max(dt, t)) {
            std::ostringstream os;
            os << "sampling time " << t << " is not on the dt = " << dt << " grid";
            throw DomainError(os.str());
        }
        steps.insert(idx);
    }
    return steps;
}

} // namespace

RunResult run(const SimConfig& cfg, const KernelSet& ks, const RunOptions& opts)
{
    cfg.validate();
    const ClosedLoopSystem sys(cfg, ks);
    const Grid& grid = sys.grid();
    const long steps = std::lround(cfg.horizon / cfg.dt);
    const double dt = cfg.dt;
    const bool event_mode = opts.mode == ScheduleMode::Event;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    std::set<long> sample_steps;
    if (opts.mode == ScheduleMode::Periodic) {
        sample_steps = schedule_steps(periodic_schedule(opts.period, cfg.horizon), dt);
    } else if (opts.mode == ScheduleMode::Jitter) {
        sample_steps = schedule_steps(jitter_schedule(opts.period, cfg.horizon, opts.seed, dt), dt);
    }

    RunResult res;
    res.log.reserve(steps + 1);

    Eigen::VectorXd state = sys.initial_state(cfg.u0.on(grid), cfg.uhat0.on(grid));
    TriggerRuntime rt;
    rt.m = opts.trigger.m0;
    if (event_mode && !(rt.m < 0.0)) {
        throw DomainError("m0 must be negative");
    }

    Observed now = observe(sys, ks, state, 0.0);
    if (opts.mode != ScheduleMode::OpenLoop) {
        rt.record_event(0.0, sys.control_law(now.meas.uhat), now.meas.uhat);
        now.signals.d = 0.0;
    }
    append(res.log, 0.0, now.meas, rt.held_input, now.signals.d, event_mode ? rt.m : nan,
           opts.mode != ScheduleMode::OpenLoop);
    if (opts.snapshot_every > 0) {
        res.snapshots.push_back({0.0, now.meas.u, now.meas.uhat});
    }
    bool event_at_start = opts.mode != ScheduleMode::OpenLoop;

    for (long n = 0; n < steps; ++n) {
        const double t_next = (n + 1) * dt;
        Eigen::VectorXd next = sys.step(state, rt.held_input);
        Observed after = observe(sys, ks, next, rt.held_input);
        TriggerStep ts;

        if (event_mode) {
            ts = trigger_step(rt.m, now.signals, after.signals, opts.trigger, dt, opts.trigger_substeps);
            if (ts.fire && !event_at_start) {
                // Refresh the input at t_n so the held value never lets d^2 outrun -gamma m.
                rt.record_event(n * dt, sys.control_law(now.meas.uhat), now.meas.uhat);
                now.signals.d = 0.0;
                res.log.event.back() = 1;
                res.log.U.back() = rt.held_input;
                res.log.d.back() = 0.0;
                event_at_start = true;

                next = sys.step(state, rt.held_input);
                after = observe(sys, ks, next, rt.held_input);
                ts = trigger_step(rt.m, now.signals, after.signals, opts.trigger, dt, opts.trigger_substeps);
            }
            if (ts.m_peak >= 0.0) {
                ++res.diagnostics.m_nonnegative;
            }
            rt.m = ts.m_next;
        }

        state = std::move(next);
        now = std::move(after);
        event_at_start = false;

        const bool sample_now = (event_mode && ts.fire) || sample_steps.count(n + 1) > 0;
        if (sample_now) {
            if (event_mode) {
                ++res.diagnostics.late_events;
            }
            rt.record_event(t_next, sys.control_law(now.meas.uhat), now.meas.uhat);
            now.signals.d = 0.0;
            event_at_start = true;
        }
        rt.d = now.signals.d;

        if (event_mode) {
            if (!(rt.m < 0.0)) {
                ++res.diagnostics.m_nonnegative;
            }
            if (trigger_fires(rt.d, rt.m, opts.trigger.gamma)) {
                ++res.diagnostics.threshold_exceeded;
            }
        }
        append(res.log, t_next, now.meas, rt.held_input, rt.d, event_mode ? rt.m : nan, sample_now);
        if (opts.snapshot_every > 0 && (n + 1) % opts.snapshot_every == 0) {
            res.snapshots.push_back({t_next, now.meas.u, now.meas.uhat});
        }
    }

    if (event_mode) {
        double mx = -std::numeric_limits<double>::infinity();
        for (double v : res.log.m) {
            mx = std::max(mx, v);
        }
        res.diagnostics.max_m = mx;
    }
    res.events = rt.event_log;
    return res;
}

double fit_decay_rate(std::span<const double> times, std::span<const double> values)
{
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < times.size() && i < values.size(); ++i) {
        if (!(values[i] > 0.0)) {
            continue;
        }
        const double y = std::log(values[i]);
        st += times[i];
        sy += y;
        stt += times[i] * times[i];
        sty += times[i] * y;
        ++n;
    }
    if (n < 2) {
        throw PreconditionError("decay fit needs at least two positive samples");
    }
    const double slope = (n * sty - st * sy) / (n * stt - st * st);
    return -slope;
}

void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag, std::span<const double> upper,
                       std::span<double> rhs)
{
    const std::size_t n = diag.size();
    std::vector<double> c(n, 0.0);
    double denom = diag[0];
    c[0] = n > 1 ? upper[0] / denom : 0.0;
    rhs[0] /= denom;
    for (std::size_t i = 1; i < n; ++i) {
        denom = diag[i] - lower[i] * c[i - 1];
        if (i + 1 < n) {
            c[i] = upper[i] / denom;
        }
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / denom;
    }
    for (std::size_t i = n - 1; i-- > 0;) {
        rhs[i] -= c[i] * rhs[i + 1];
    }
}

ErrorTargetTrace simulate_error_target(const PlantParams& p, int intervals, double dt, double horizon,
                                       std::span<const double> w0)
{
    const Grid grid(intervals);
    const int M = intervals;
    const double h = grid.step();
    const double a = dt * p.epsilon / (h * h);

    // Unknowns w_1..w_M; lower[i] couples i to i-1, upper[i] to i+1.
    std::vector<double> lower(M, -a), diag(M, 1.0 + 2.0 * a), upper(M, -a);
    lower[0] = 0.0;
    upper[M - 1] = 0.0;
    lower[M - 1] = -2.0 * a;
    diag[M - 1] = 1.0 + 2.0 * a + 2.0 * a * h * p.q;

    GridFunction w(w0.begin(), w0.end());
    w[0] = 0.0;
    ErrorTargetTrace tr;
    tr.t.push_back(0.0);
    tr.norm.push_back(l2_norm(w, h));
    const long steps = std::lround(horizon / dt);
    std::vector<double> rhs(M);
    for (long n = 0; n < steps; ++n) {
        std::copy(w.begin() + 1, w.end(), rhs.begin());
        solve_tridiagonal(lower, diag, upper, rhs);
        std::copy(rhs.begin(), rhs.end(), w.begin() + 1);
        tr.t.push_back((n + 1) * dt);
        tr.norm.push_back(l2_norm(w, h));
    }
    return tr;
}

} // namespace rdbc
