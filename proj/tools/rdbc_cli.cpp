// Command-line driver: kernels, certificate, simulate, verify.

#include "rdbc/config.hpp"
#include "rdbc/csv.hpp"
#include "rdbc/errors.hpp"
#include "rdbc/experiment.hpp"
#include "rdbc/verify.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <map>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct CommonArgs {
    std::string config_file;
    std::string preset;
    std::string out_dir;
    std::vector<std::string> sets;
    std::map<std::string, std::string> flags; // flag value per config key
};

// Flag name -> config key.
const std::vector<std::pair<std::string, std::string>> kFlagKeys = {
    {"epsilon", "plant.epsilon"}, {"lambda", "plant.lambda"},   {"q", "plant.q"},
    {"M", "grid.M"},              {"dt", "grid.dt"},            {"horizon", "grid.horizon"},
    {"mode", "schedule.mode"},    {"period", "schedule.period"}, {"seed", "schedule.seed"},
    {"eta", "trigger.eta"},       {"gamma", "trigger.gamma"},   {"vartheta", "trigger.vartheta"},
    {"m0", "trigger.m0"},         {"beta1", "trigger.beta1"},   {"beta2", "trigger.beta2"},
    {"beta3", "trigger.beta3"},   {"B", "lyapunov.B"},          {"kappa1", "lyapunov.kappa1"},
    {"kappa2", "lyapunov.kappa2"}, {"kappa3", "lyapunov.kappa3"}, {"sigma", "certificate.sigma"},
    {"N", "certificate.N"},       {"snapshot-every", "output.snapshot_every"},
};

void add_common(CLI::App* cmd, CommonArgs& args)
{
    cmd->add_option("-c,--config", args.config_file, "config file (key = value with [sections])");
    cmd->add_option("-p,--preset", args.preset, "preset name")
        ->check(CLI::IsMember(rdbc::preset_names()));
    cmd->add_option("-o,--out", args.out_dir, "output directory (RD_OUT_DIR overrides)");
    cmd->add_option("--set", args.sets, "override any section.key=value");
    for (const auto& [flag, key] : kFlagKeys) {
        cmd->add_option("--" + flag, args.flags[key], "sets " + key);
    }
}

rdbc::ExperimentConfig resolve(const CommonArgs& args)
{
    std::vector<rdbc::ConfigEntry> entries;
    if (!args.config_file.empty()) {
        entries = rdbc::parse_config_file(args.config_file);
    }
    std::vector<std::pair<std::string, std::string>> overrides;
    if (!args.preset.empty()) {
        overrides.emplace_back("preset", args.preset);
    }
    if (!args.out_dir.empty()) {
        overrides.emplace_back("output.dir", args.out_dir);
    }
    for (const auto& [key, value] : args.flags) {
        if (!value.empty()) {
            overrides.emplace_back(key, value);
        }
    }
    for (const std::string& s : args.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            throw rdbc::ConfigError("--set expects section.key=value, got '" + s + "'");
        }
        overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    return rdbc::resolve_config(entries, overrides);
}

void echo_config(const rdbc::ExperimentConfig& cfg)
{
    std::cout << "# configuration\n";
    for (const auto& [k, v] : rdbc::describe(cfg)) {
        std::cout << "#   " << k << " = " << v << '\n';
    }
}

void print_values(const rdbc::NamedValues& values)
{
    for (const auto& [k, v] : values) {
        std::cout << k << " = " << rdbc::full_precision(v) << '\n';
    }
}

int cmd_kernels(const CommonArgs& args)
{
    const rdbc::ExperimentConfig cfg = resolve(args);
    echo_config(cfg);
    const rdbc::KernelSet ks = rdbc::build_kernel_set(cfg.params, cfg.intervals);
    const rdbc::DerivedConstants dc = rdbc::derive_constants(cfg, ks);

    rdbc::CsvTable t;
    std::vector<double> x(ks.grid.nodes());
    for (int i = 0; i < ks.grid.nodes(); ++i) {
        x[i] = ks.grid.x(i);
    }
    t.add_column("x", x);
    t.add_column("k", ks.k);
    t.add_column("k_prime", ks.k_prime);
    t.add_column("k_second", ks.k_second);
    t.add_column("p1", ks.p1);
    t.add_column("g", ks.g);
    const auto path = cfg.out_dir / (cfg.preset + "_gains.csv");
    rdbc::write_csv(path, t);

    // Long format: one row per grid pair; each kernel is zero off its own triangle.
    std::vector<double> xs, ys, P, Q, K, L;
    for (int i = 0; i < ks.grid.nodes(); ++i) {
        for (int j = 0; j < ks.grid.nodes(); ++j) {
            xs.push_back(ks.grid.x(i));
            ys.push_back(ks.grid.x(j));
            P.push_back(ks.P(i, j));
            Q.push_back(ks.Q(i, j));
            K.push_back(ks.K(i, j));
            L.push_back(ks.L(i, j));
        }
    }
    rdbc::CsvTable tables;
    tables.add_column("x", xs);
    tables.add_column("y", ys);
    tables.add_column("P", P);
    tables.add_column("Q", Q);
    tables.add_column("K", K);
    tables.add_column("L", L);
    const auto kernel_path = cfg.out_dir / (cfg.preset + "_kernels.csv");
    rdbc::write_csv(kernel_path, tables);
    const auto consts = cfg.out_dir / (cfg.preset + "_constants.csv");
    rdbc::write_constants_csv(consts, rdbc::constants_table(ks, dc));
    print_values(rdbc::constants_table(ks, dc));
    std::cout << "wrote " << kernel_path.string() << ", " << path.string() << " and " << consts.string() << '\n';
    return 0;
}

int cmd_certificate(const CommonArgs& args, int points)
{
    const rdbc::ExperimentConfig cfg = resolve(args);
    echo_config(cfg);
    const rdbc::KernelSet ks = rdbc::build_kernel_set(cfg.params, cfg.intervals);
    const rdbc::DerivedConstants dc = rdbc::derive_constants(cfg, ks);
    const rdbc::GammaCurves curves = rdbc::gamma_curves(ks, dc.certificate);

    std::vector<double> T, g1, g2;
    for (int i = 0; i < points; ++i) {
        const double t = std::pow(10.0, -7.0 + 6.0 * i / (points - 1));
        T.push_back(t);
        g1.push_back(curves.gamma1(t));
        g2.push_back(curves.gamma2(t));
    }
    rdbc::CsvTable table;
    table.add_column("T", T);
    table.add_column("gamma1", g1);
    table.add_column("gamma2", g2);
    const auto curve_path = cfg.out_dir / (cfg.preset + "_gamma.csv");
    const auto consts = cfg.out_dir / (cfg.preset + "_constants.csv");
    rdbc::write_csv(curve_path, table);
    rdbc::write_constants_csv(consts, rdbc::constants_table(ks, dc));
    print_values(rdbc::constants_table(ks, dc));
    std::cout << "wrote " << consts.string() << " and " << curve_path.string() << '\n';
    return 0;
}

int cmd_simulate(const CommonArgs& args)
{
    const rdbc::ExperimentConfig cfg = resolve(args);
    echo_config(cfg);
    const rdbc::ExperimentReport rep = rdbc::run_experiment(cfg);
    print_values(rep.checks);
    std::cout << "wrote " << rep.trajectory_csv.string() << ", " << rep.constants_csv.string() << ", "
              << rep.manifest.string() << '\n';
    if (!rep.invariants_ok) {
        std::cerr << "trigger invariants violated\n";
        return kExitNumeric;
    }
    return 0;
}

int cmd_verify(const std::string& fault)
{
    const auto results = rdbc::run_invariant_suite(rdbc::parse_fault(fault));
    int failed = 0;
    for (const auto& r : results) {
        std::cout << (r.passed ? "PASS  " : "FAIL  ") << r.name << "  (" << r.detail << ")\n";
        failed += r.passed ? 0 : 1;
    }
    std::cout << results.size() - failed << "/" << results.size() << " checks passed\n";
    return failed == 0 ? 0 : kExitNumeric;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Boundary control of an unstable reaction-diffusion PDE: kernels, certificates, simulation"};
    app.require_subcommand(1);

    CommonArgs kernels_args, cert_args, sim_args;
    int curve_points = 200;
    std::string fault = "none";

    auto* kernels = app.add_subcommand("kernels", "tabulate gains and kernel constants");
    add_common(kernels, kernels_args);
    auto* cert = app.add_subcommand("certificate", "sampling certificate and gamma curves");
    add_common(cert, cert_args);
    cert->add_option("--points", curve_points, "log-spaced T samples in [1e-7, 1e-1]")->check(CLI::Range(2, 100000));
    auto* sim = app.add_subcommand("simulate", "closed-loop simulation");
    add_common(sim, sim_args);
    auto* verify = app.add_subcommand("verify", "run the invariant suite");
    verify->add_option("--fault", fault, "inject a fault: none, p10-sign, L-sign");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*kernels) {
            return cmd_kernels(kernels_args);
        }
        if (*cert) {
            return cmd_certificate(cert_args, curve_points);
        }
        if (*sim) {
            return cmd_simulate(sim_args);
        }
        return cmd_verify(fault);
    } catch (const rdbc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const rdbc::AssumptionViolation& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
}
