#include "rdbc/verify.hpp"

#include "rdbc/csv.hpp"
#include "rdbc/errors.hpp"
#include "rdbc/experiment.hpp"
#include "rdbc/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <sstream>

namespace rdbc {

Fault parse_fault(const std::string& name)
{
    if (name == "none") {
        return Fault::None;
    }
    if (name == "p10-sign") {
        return Fault::P10Sign;
    }
    if (name == "L-sign") {
        return Fault::LSign;
    }
    throw ConfigError("unknown fault '" + name + "' (expected none, p10-sign or L-sign)");
}

namespace {

std::string num(double v)
{
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

double max_abs_diff(std::span<const double> a, std::span<const double> b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::fabs(a[i] - b[i]));
    }
    return m;
}

bool same_values(const std::vector<double>& a, const std::vector<double>& b)
{
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        const bool both_nan = std::isnan(a[i]) && std::isnan(b[i]);
        if (!both_nan && a[i] != b[i]) {
            return false;
        }
    }
    return true;
}

void inject(KernelSet& ks, Fault fault)
{
    if (fault == Fault::P10Sign) {
        ks.P = -ks.P;
        ks.p10 = -ks.p10;
    } else if (fault == Fault::LSign) {
        ks.L = -ks.L;
    }
    ks.transforms = VolterraTransforms(ks.P, ks.Q, ks.K, ks.L, ks.grid.step());
}

/// Smooth polynomial with f(0) = 0 and random coefficients.
std::vector<double> random_profile(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> c(-20.0, 20.0);
    return {0.0, c(rng), c(rng), c(rng), c(rng)};
}

} // namespace

std::vector<CheckResult> run_invariant_suite(Fault fault)
{
    std::vector<CheckResult> out;
    auto add = [&out](std::string name, bool ok, std::string detail) {
        out.push_back({std::move(name), ok, std::move(detail)});
    };

    ExperimentConfig cfg;
    apply_preset(cfg, "paper-event-eta1");
    cfg.sigma = 0.0266;
    cfg.modes = 9;
    KernelSet ks = build_kernel_set(cfg.params, cfg.intervals);
    inject(ks, fault);
    const Grid& grid = ks.grid;
    const double h = grid.step();
    const DerivedConstants dc = derive_constants(cfg, ks);

    {
        double worst = 0.0;
        for (double z : {0.1, 0.5, 1.0, 3.0, 7.0, 12.0, 20.0}) {
            const double s = z * z / 4.0;
            worst = std::max(worst, std::fabs(0.5 * specfun::g1(s) * z / std::cyl_bessel_i(1.0, z) - 1.0));
            worst = std::max(worst, std::fabs(0.5 * specfun::g1(-s) - std::cyl_bessel_j(1.0, z) / z));
        }
        add("series agrees with Bessel I1 and J1", worst < 1e-12, "worst deviation " + num(worst));
    }

    const GridFunction f = sample(grid, [](double x) { return std::sin(std::numbers::pi * x) + x * x; });
    {
        const auto& t = ks.transforms;
        const double e1 = max_abs_diff(t.controller_inverse(t.controller_forward(f)), f);
        const double e2 = max_abs_diff(t.controller_forward(t.controller_inverse(f)), f);
        add("controller transform round trip (K, L)", std::max(e1, e2) < 1e-3,
            "max error " + num(std::max(e1, e2)));
        const double e3 = max_abs_diff(t.observer_inverse(t.observer_forward(f)), f);
        const double e4 = max_abs_diff(t.observer_forward(t.observer_inverse(f)), f);
        add("observer transform round trip (P, Q)", std::max(e3, e4) < 1e-3, "max error " + num(std::max(e3, e4)));
    }

    {
        double worst = 0.0;
        for (double theta : {cfg.params.q, cfg.params.r()}) {
            for (int n = 1; n <= 20; ++n) {
                const double nu = sl_root(theta, n);
                worst = std::max(worst, std::fabs(nu * std::cos(nu) + theta * std::sin(nu)));
            }
        }
        add("Sturm-Liouville root residuals", worst < 1e-10, "worst residual " + num(worst));
    }

    {
        const GammaCurves curves = gamma_curves(ks, dc.certificate);
        bool monotone = true;
        double prev1 = curves.gamma1(0.0);
        double prev2 = curves.gamma2(0.0);
        for (int i = 1; i <= 200; ++i) {
            const double T = 1e-2 * i / 200.0;
            monotone = monotone && curves.gamma1(T) < prev1 && curves.gamma2(T) < prev2;
            prev1 = curves.gamma1(T);
            prev2 = curves.gamma2(T);
        }
        const bool ok = curves.gamma2(0.0) == 1.0 && curves.gamma1(0.0) > 0.0 && monotone;
        add("small-gain curves start positive and decrease", ok,
            "gamma1(0) = " + num(curves.gamma1(0.0)) + ", T* = " + num(dc.certificate.Tstar));
    }

    {
        const double s = cfg.trigger.gamma * (1.0 - cfg.trigger.vartheta);
        const Betas& b = dc.computed_betas;
        const double e = std::max({std::fabs(b.beta1 * s / dc.alphas.alpha1 - 1.0),
                                   std::fabs(b.beta2 * s / dc.alphas.alpha2 - 1.0),
                                   std::fabs(b.beta3 * s / dc.alphas.alpha3 - 1.0)});
        add("beta synthesis inverts exactly", e < 1e-14, "relative error " + num(e));
    }

    SimConfig sim = simulation_config(cfg, dc);
    RunOptions ro = run_options(cfg, dc);

    {
        std::mt19937_64 rng(20240601);
        int violations = 0;
        int runs = 0;
        for (int i = 0; i <= 10; ++i) {
            SimConfig sc = sim;
            if (i > 0) {
                sc.u0 = InitialProfile::polynomial(random_profile(rng));
                sc.uhat0 = InitialProfile::polynomial(random_profile(rng));
            }
            const RunResult r = run(sc, ks, ro);
            violations += r.diagnostics.m_nonnegative + r.diagnostics.threshold_exceeded;
            ++runs;
        }
        add("trigger keeps m < 0 and d^2 <= -gamma m", violations == 0,
            std::to_string(violations) + " violations over " + std::to_string(runs) + " runs");
    }

    RunOptions traced = ro;
    traced.snapshot_every = 1;
    const RunResult event_run = run(sim, ks, traced);
    {
        RunOptions open = traced;
        open.mode = ScheduleMode::OpenLoop;
        const RunResult open_run = run(sim, ks, open);
        double worst = 0.0;
        for (std::size_t i = 0; i < event_run.snapshots.size(); ++i) {
            const Snapshot& a = event_run.snapshots[i];
            const Snapshot& b = open_run.snapshots[i];
            for (int j = 0; j < grid.nodes(); ++j) {
                worst = std::max(worst, std::fabs((a.u[j] - a.uhat[j]) - (b.u[j] - b.uhat[j])));
            }
        }
        const double scale = event_run.log.norm_utilde.front();
        add("observer error does not depend on the input", worst <= 1e-10 * scale,
            "max difference " + num(worst));

        const double grow = open_run.log.norm_u.back() / open_run.log.norm_u.front();
        add("open loop grows when lambda > eps pi^2", grow > 1.0, "norm ratio " + num(grow));
    }

    {
        const double sigma1 = dc.certificate.sigma1;
        double w0 = 0.0;
        double worst = 0.0;
        for (const Snapshot& s : event_run.snapshots) {
            GridFunction ut(s.u.size());
            for (std::size_t j = 0; j < ut.size(); ++j) {
                ut[j] = s.u[j] - s.uhat[j];
            }
            const double w = l2_norm(ks.transforms.observer_forward(ut), h);
            if (s.t == 0.0) {
                w0 = w;
            }
            worst = std::max(worst, w / (w0 * std::exp(-sigma1 * s.t)));
        }
        add("observer target norm stays under its decay envelope", worst <= 1.05,
            "max ratio to envelope " + num(worst));
    }

    {
        const RunResult again = run(sim, ks, ro);
        const bool same = same_values(again.log.norm_u, event_run.log.norm_u) &&
                          same_values(again.log.m, event_run.log.m) && again.events == event_run.events;
        add("identical runs give identical logs", same, same ? "bit-identical" : "logs differ");
    }

    {
        const KernelSet fine = build_kernel_set(cfg.params, 2 * cfg.intervals);
        SimConfig sf = sim;
        sf.intervals = fine.grid.intervals();
        sf.dt = sim.dt / 2.0;
        const RunResult rf = run(sf, fine, ro);
        const double a = event_run.log.norm_u.back();
        const double b = rf.log.norm_u.back();
        const double rel = std::fabs(a - b) / std::max(a, b);
        add("refining grid and step moves terminal norm by < 5%", rel < 0.05, "relative change " + num(rel));
    }

    {
        RunOptions open = ro;
        open.mode = ScheduleMode::OpenLoop;
        SimConfig sc = sim;
        sc.horizon = 0.05;
        const CsvTable table = trajectory_table(run(sc, ks, open).log);
        const auto path = std::filesystem::temp_directory_path() / "rdbc_verify_roundtrip.csv";
        write_csv(path, table);
        const CsvTable back = read_csv(path);
        std::filesystem::remove(path);
        bool same = back.header == table.header;
        for (std::size_t j = 0; same && j < table.columns.size(); ++j) {
            same = same_values(back.columns[j], table.columns[j]);
        }
        add("trajectory CSV round-trips exactly", same, same ? "exact" : "mismatch");
    }

    return out;
}

} // namespace rdbc
