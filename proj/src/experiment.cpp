#include "rdbc/experiment.hpp"

#include "rdbc/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace rdbc {

std::string full_precision(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

DerivedConstants derive_constants(const ExperimentConfig& cfg, const KernelSet& ks)
{
    DerivedConstants dc;
    dc.alphas = lemma5_constants(ks);
    dc.computed_betas = synthesize_betas(dc.alphas, cfg.trigger.gamma, cfg.trigger.vartheta);
    dc.betas = cfg.betas.value_or(dc.computed_betas);
    dc.feasibility = feasibility_check(ks.params, ks.norm_g_sq, cfg.gains, dc.betas);
    CertificateOptions opts;
    opts.sigma = cfg.sigma;
    opts.modes = cfg.modes;
    dc.certificate = build_certificate(ks, opts);
    return dc;
}

NamedValues constants_table(const KernelSet& ks, const DerivedConstants& dc)
{
    const SamplingCertificate& c = dc.certificate;
    const int last = ks.grid.intervals();
    return {
        {"epsilon", ks.params.epsilon},
        {"lambda", ks.params.lambda},
        {"q", ks.params.q},
        {"M", static_cast<double>(ks.grid.intervals())},
        {"r", ks.r},
        {"p10", ks.p10},
        {"p1_at_1", ks.p1[last]},
        {"k_at_1", ks.k[last]},
        {"k_prime_at_1", ks.k_prime[last]},
        {"norm_k", ks.norm_k},
        {"norm_p1", ks.norm_p1},
        {"norm_g_sq", ks.norm_g_sq},
        {"Ltilde", ks.norms.Ltilde},
        {"Ptilde", ks.norms.Ptilde},
        {"Qtilde", ks.norms.Qtilde},
        {"Ktilde", ks.norms.Ktilde},
        {"Px_sq_int", ks.norms.Px_sq_int},
        {"Qx_sq_int", ks.norms.Qx_sq_int},
        {"rho1", dc.alphas.rho1},
        {"alpha1", dc.alphas.alpha1},
        {"alpha2", dc.alphas.alpha2},
        {"alpha3", dc.alphas.alpha3},
        {"beta1_computed", dc.computed_betas.beta1},
        {"beta2_computed", dc.computed_betas.beta2},
        {"beta3_computed", dc.computed_betas.beta3},
        {"beta1", dc.betas.beta1},
        {"beta2", dc.betas.beta2},
        {"beta3", dc.betas.beta3},
        {"rho", dc.feasibility.rho},
        {"feasibility_margin", dc.feasibility.margin},
        {"feasible", dc.feasibility.ok ? 1.0 : 0.0},
        {"A_min", dc.feasibility.A_min},
        {"sigma", c.sigma},
        {"mu_tilde1", c.lemma.mu_tilde1},
        {"mu_q1", c.lemma.mu_q1},
        {"mu_r1", c.lemma.mu_r1},
        {"nu_q1", c.spectrum.nu.at(0)},
        {"nu_r1", sl_root(ks.params.r(), 1)},
        {"M1", c.lemma.M1},
        {"C1", c.lemma.C1},
        {"C2", c.lemma.C2},
        {"N", static_cast<double>(c.N)},
        {"tail", c.modal.tail},
        {"tail_parseval", c.modal.tail_parseval},
        {"small_gain", c.small_gain},
        {"gamma1_at_0", c.gamma1_at_0},
        {"gamma2_at_0", c.gamma2_at_0},
        {"Tstar", c.Tstar},
        {"Omega1", c.constants.Omega1},
        {"Omega2", c.constants.Omega2},
        {"Xi", c.constants.Xi},
        {"M_of_Tstar", c.constants.M_of_T},
    };
}

double effective_period(const ExperimentConfig& cfg, const DerivedConstants& dc)
{
    return cfg.period > 0.0 ? cfg.period : dc.certificate.Tstar;
}

double effective_dt(const ExperimentConfig& cfg, const DerivedConstants& dc)
{
    if (cfg.mode == ScheduleMode::Periodic || cfg.mode == ScheduleMode::Jitter) {
        return effective_period(cfg, dc) / cfg.steps_per_period;
    }
    return cfg.dt;
}

SimConfig simulation_config(const ExperimentConfig& cfg, const DerivedConstants& dc)
{
    SimConfig sc;
    sc.params = cfg.params;
    sc.intervals = cfg.intervals;
    sc.dt = effective_dt(cfg, dc);
    sc.horizon = cfg.horizon;
    sc.u0 = InitialProfile::polynomial(cfg.u0);
    sc.uhat0 = InitialProfile::polynomial(cfg.uhat0);
    return sc;
}

RunOptions run_options(const ExperimentConfig& cfg, const DerivedConstants& dc)
{
    RunOptions ro;
    ro.mode = cfg.mode;
    ro.trigger = cfg.trigger;
    ro.trigger.rho = dc.feasibility.rho;
    ro.trigger.betas = dc.betas;
    ro.period = effective_period(cfg, dc);
    ro.seed = cfg.seed;
    ro.trigger_substeps = cfg.trigger_substeps;
    ro.snapshot_every = cfg.snapshot_every;
    return ro;
}

CsvTable trajectory_table(const TrajectoryLog& log)
{
    CsvTable t;
    t.add_column("t", log.t);
    t.add_column("norm_u", log.norm_u);
    t.add_column("norm_uhat", log.norm_uhat);
    t.add_column("norm_utilde", log.norm_utilde);
    t.add_column("norm_utilde_x", log.norm_utilde_x);
    t.add_column("U", log.U);
    t.add_column("d", log.d);
    t.add_column("m", log.m);
    t.add_column("event", std::vector<double>(log.event.begin(), log.event.end()));
    return t;
}

namespace {

NamedValues evaluate_checks(const ExperimentConfig& cfg, const DerivedConstants& dc, const RunResult& res,
                            bool& invariants_ok)
{
    NamedValues checks;
    const TrajectoryLog& log = res.log;
    checks.emplace_back("events", static_cast<double>(res.events.size()));
    checks.emplace_back("final_norm_u_ratio", log.norm_u.back() / log.norm_u.front());
    checks.emplace_back("final_norm_utilde_ratio", log.norm_utilde.back() / log.norm_utilde.front());

    if (cfg.mode == ScheduleMode::Event) {
        const TriggerDiagnostics& d = res.diagnostics;
        checks.emplace_back("m_nonnegative_steps", d.m_nonnegative);
        checks.emplace_back("threshold_exceeded_steps", d.threshold_exceeded);
        checks.emplace_back("late_events", d.late_events);
        checks.emplace_back("max_m", d.max_m);
        if (res.events.size() >= 2) {
            const DwellStats ds = dwell_stats(res.events);
            checks.emplace_back("min_dwell", ds.min_dwell);
            checks.emplace_back("mean_dwell", ds.mean_dwell);
        }
        invariants_ok = d.m_nonnegative == 0 && d.threshold_exceeded == 0;
        checks.emplace_back("trigger_invariants_check", invariants_ok ? 1.0 : 0.0);
    }

    if (cfg.mode != ScheduleMode::Event) {
        std::vector<double> combined(log.size());
        for (std::size_t i = 0; i < log.size(); ++i) {
            combined[i] = log.norm_uhat[i] + log.norm_utilde[i] + log.norm_utilde_x[i];
        }
        const double rate = fit_decay_rate(log.t, combined);
        const double period = effective_period(cfg, dc);
        const bool covered = cfg.mode != ScheduleMode::OpenLoop && period <= dc.certificate.Tstar;
        checks.emplace_back("fitted_rate", rate);
        checks.emplace_back("certificate_covers_period", covered ? 1.0 : 0.0);
        checks.emplace_back("decay_rate_check", covered && rate >= 0.5 * dc.certificate.sigma ? 1.0 : 0.0);
    }
    return checks;
}

} // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg)
{
    cfg.validate();
    const KernelSet ks = build_kernel_set(cfg.params, cfg.intervals);
    const DerivedConstants dc = derive_constants(cfg, ks);

    ExperimentReport rep;
    rep.constants = constants_table(ks, dc);
    rep.run = run(simulation_config(cfg, dc), ks, run_options(cfg, dc));
    rep.checks = evaluate_checks(cfg, dc, rep.run, rep.invariants_ok);

    const std::string name = cfg.preset;
    rep.trajectory_csv = cfg.out_dir / (name + "_trajectory.csv");
    rep.constants_csv = cfg.out_dir / (name + "_constants.csv");
    rep.manifest = cfg.out_dir / (name + "_manifest.txt");
    write_csv(rep.trajectory_csv, trajectory_table(rep.run.log));
    write_constants_csv(rep.constants_csv, rep.constants);

    if (!rep.run.snapshots.empty()) {
        rep.snapshots_csv = cfg.out_dir / (name + "_snapshots.csv");
        const Grid grid(cfg.intervals);
        CsvTable snaps;
        std::vector<double> t, x, u, uhat;
        for (const Snapshot& s : rep.run.snapshots) {
            for (int i = 0; i < grid.nodes(); ++i) {
                t.push_back(s.t);
                x.push_back(grid.x(i));
                u.push_back(s.u[i]);
                uhat.push_back(s.uhat[i]);
            }
        }
        snaps.add_column("t", t);
        snaps.add_column("x", x);
        snaps.add_column("u", u);
        snaps.add_column("uhat", uhat);
        write_csv(rep.snapshots_csv, snaps);
    }

    std::ofstream out(rep.manifest);
    if (!out) {
        throw std::runtime_error("cannot write " + rep.manifest.string());
    }
    out << "[config]\n";
    for (const auto& [k, v] : describe(cfg)) {
        out << k << " = " << v << '\n';
    }
    out << "\n[resolved]\n";
    out << "dt = " << full_precision(effective_dt(cfg, dc)) << '\n';
    out << "period = " << full_precision(effective_period(cfg, dc)) << '\n';
    out << "steps = " << rep.run.log.size() - 1 << '\n';
    out << "\n[constants]\n";
    for (const auto& [k, v] : rep.constants) {
        out << k << " = " << full_precision(v) << '\n';
    }
    out << "\n[checks]\n";
    for (const auto& [k, v] : rep.checks) {
        out << k << " = " << full_precision(v) << '\n';
    }
    return rep;
}

} // namespace rdbc
