#pragma once

#include "rdbc/config.hpp"
#include "rdbc/csv.hpp"
#include "rdbc/kernels.hpp"
#include "rdbc/pdesim.hpp"
#include "rdbc/spectral.hpp"
#include "rdbc/trigger.hpp"

#include <filesystem>
#include <string>

namespace rdbc {

/// Everything computed from the parameters before any simulation.
struct DerivedConstants {
    DerivativeBound alphas;
    Betas computed_betas; ///< synthesized from `alphas`
    Betas betas;          ///< in use: computed unless overridden
    Feasibility feasibility;
    SamplingCertificate certificate;
};

DerivedConstants derive_constants(const ExperimentConfig& cfg, const KernelSet& ks);

/// Flat name/value list of all derived constants (constants CSV and manifest).
NamedValues constants_table(const KernelSet& ks, const DerivedConstants& dc);

/// Time step actually simulated: cfg.dt, or period / steps_per_period in sampled modes.
double effective_dt(const ExperimentConfig& cfg, const DerivedConstants& dc);
/// Sampling diameter actually used: cfg.period, or T* when it is 0.
double effective_period(const ExperimentConfig& cfg, const DerivedConstants& dc);

SimConfig simulation_config(const ExperimentConfig& cfg, const DerivedConstants& dc);
RunOptions run_options(const ExperimentConfig& cfg, const DerivedConstants& dc);

struct ExperimentReport {
    RunResult run;
    NamedValues constants;
    NamedValues checks; ///< pass/fail flags (1/0) and the quantities behind them
    bool invariants_ok = true;
    std::filesystem::path trajectory_csv;
    std::filesystem::path constants_csv;
    std::filesystem::path manifest;
    std::filesystem::path snapshots_csv;
};

/// Simulates `cfg` and writes <name>_trajectory.csv, <name>_constants.csv and <name>_manifest.txt
/// (plus <name>_snapshots.csv when snapshots are on) into cfg.out_dir.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

CsvTable trajectory_table(const TrajectoryLog& log);

/// %.17g text, enough to reproduce the double exactly.
std::string full_precision(double v);

} // namespace rdbc
