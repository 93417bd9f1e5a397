#pragma once

#include <map>
#include <string>

#include "sdnf/config.hpp"
#include "sdnf/ekf.hpp"
#include "sdnf/pattern.hpp"
#include "sdnf/sde.hpp"

namespace sdnf {

struct RunRecord {
    int run_index = 0;
    std::uint64_t seed = 0;
    int truth_bumps = 0;
    std::map<std::string, int> filter_bumps;     // keyed by scheme name
    std::map<std::string, double> mean_rmse;     // mean over sampling instants
    std::map<std::string, double> final_rmse;
    double wall_time_s = 0.0;
    bool failed = false;
    std::string error;
};

struct TwinResult {
    Trajectory truth;
    MeasurementSet measurements;
    std::map<std::string, FilterResult> reconstructions;
    std::map<std::string, std::vector<double>> rmse_series;
    RunRecord record;
};

struct MonteCarloResult {
    std::map<std::string, MismatchTable> tables;
    std::vector<RunRecord> records;
    CovarianceHealth health; // aggregated over all filter runs
    int failed_runs = 0;
};

struct SweepPoint {
    double sensor_spacing = 0.0;
    std::map<std::string, int> total_mismatch;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    CovarianceHealth health;
};

/// Simulate truth -> subsample in time and space -> add measurement noise
/// -> run the configured filter(s) -> score.  Models can be passed in to
/// amortize kernel-matrix construction across runs.
TwinResult run_twin_experiment(const ExperimentConfig& cfg, int run_index = 0);
TwinResult run_twin_experiment(const ExperimentConfig& cfg, int run_index,
                               const FieldModel& truth_model, const FieldModel& filter_model);

MonteCarloResult run_monte_carlo(const ExperimentConfig& cfg);

SweepResult run_spacing_sweep(const ExperimentConfig& cfg);

// ---- persistence ------------------------------------------------------

std::string format_double(double v); // 9 significant digits

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          bool include_fields = false);
void write_reconstruction_csv(const std::string& path, const FilterResult& result);
void write_records_csv(const std::string& path, const std::vector<RunRecord>& records,
                       const std::vector<std::string>& scheme_names);
void write_timings_csv(const std::string& path, const std::vector<RunRecord>& records);
void write_mismatch_csv(const std::string& path, const MismatchTable& table);
std::string mismatch_table_text(const std::map<std::string, MismatchTable>& tables);
void write_sweep_csv(const std::string& path, const SweepResult& sweep,
                     const std::vector<std::string>& scheme_names);
void write_field_csv(const std::string& path, const Vector& x, const Vector& field);

/// Writes config echo, per-run records, mismatch tables (CSV + aligned
/// text) into out_dir, creating it if needed.
void persist_monte_carlo(const std::string& out_dir, const ExperimentConfig& cfg,
                         const MonteCarloResult& result);

} // namespace sdnf
