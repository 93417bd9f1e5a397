#include "sdnf/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

namespace sdnf {

namespace {

void merge_health(CovarianceHealth& into, const CovarianceHealth& from) {
    into.clamp_events += from.clamp_events;
    into.worst_eig_ratio = std::min(into.worst_eig_ratio, from.worst_eig_ratio);
    into.max_asymmetry = std::max(into.max_asymmetry, from.max_asymmetry);
}

} // namespace

TwinResult run_twin_experiment(const ExperimentConfig& cfg, int run_index) {
    const FieldModel truth_model = make_truth_model(cfg);
    const FieldModel filter_model = make_filter_model(cfg);
    return run_twin_experiment(cfg, run_index, truth_model, filter_model);
}

TwinResult run_twin_experiment(const ExperimentConfig& cfg, int run_index,
                               const FieldModel& truth_model, const FieldModel& filter_model) {
    const auto t_start = std::chrono::steady_clock::now();
    cfg.validate();

    const SpectralBasis& basis = truth_model.basis();
    const int n_meas = static_cast<int>(
        std::llround(cfg.discretization.horizon / cfg.observation.sampling_period));
    const int steps_per_meas = static_cast<int>(
        std::llround(cfg.observation.sampling_period / cfg.discretization.h_t));

    TwinResult out;
    out.record.run_index = run_index;
    out.record.seed = seed::derive(cfg.monte_carlo.master_seed, run_index, seed::kTruth);

    RngStream truth_rng(cfg.monte_carlo.master_seed, run_index, seed::kTruth);
    out.truth = simulate_truth(truth_model, Scheme::it15, cfg.discretization.h_t,
                               cfg.discretization.horizon,
                               Vector::Zero(cfg.discretization.n_modes + 1), truth_rng,
                               steps_per_meas);

    // truth fields at 0, Delta_t, ..., T
    if (static_cast<int>(out.truth.fields_on_mesh.size()) != n_meas + 1)
        throw std::logic_error("truth field recording misaligned with sampling grid");

    out.measurements.layout = SensorLayout::build(basis, cfg.observation.sensor_spacing);
    const Eigen::Index m = out.measurements.layout.H.rows();
    out.measurements.noise_variances = Vector::Constant(m, cfg.observation.noise_variance);

    RngStream meas_rng(cfg.monte_carlo.master_seed, run_index, seed::kMeasurementNoise);
    const double noise_sd = std::sqrt(cfg.observation.noise_variance);
    for (int k = 1; k <= n_meas; ++k) {
        out.measurements.times.push_back(k * cfg.observation.sampling_period);
        const Vector& field = out.truth.fields_on_mesh[k];
        Vector z(m);
        for (Eigen::Index i = 0; i < m; ++i)
            z[i] = field[out.measurements.layout.sensor_indices[i]] + noise_sd * meas_rng.normal();
        out.measurements.readings.push_back(std::move(z));
    }

    const BumpPattern truth_pattern =
        count_bumps(out.truth.fields_on_mesh.back(), cfg.model.theta, cfg.pattern.min_width,
                    cfg.pattern.periodic);
    out.record.truth_bumps = truth_pattern.count;

    const Vector u0_estimate = Vector::Zero(cfg.discretization.n_modes + 1);
    for (Scheme scheme : cfg.filter.schemes) {
        FilterConfig fc;
        fc.scheme = scheme;
        fc.subdivisions = cfg.filter.subdivisions;
        fc.initial_cov_scale = cfg.filter.initial_cov_scale;
        fc.firing_surrogate_beta = cfg.filter.surrogate_beta;

        FilterResult res = reconstruct(out.measurements, filter_model, fc, u0_estimate);

        const std::string name = scheme_name(scheme);
        std::vector<double> rmse;
        rmse.reserve(res.steps.size());
        double sum = 0.0;
        for (size_t k = 0; k < res.steps.size(); ++k) {
            const Vector diff = res.steps[k].field_on_mesh - out.truth.fields_on_mesh[k + 1];
            const double r = std::sqrt(diff.squaredNorm() / diff.size());
            rmse.push_back(r);
            sum += r;
        }
        out.record.mean_rmse[name] = rmse.empty() ? 0.0 : sum / rmse.size();
        out.record.final_rmse[name] = rmse.empty() ? 0.0 : rmse.back();
        out.record.filter_bumps[name] =
            count_bumps(res.steps.back().field_on_mesh, cfg.model.theta, cfg.pattern.min_width,
                        cfg.pattern.periodic)
                .count;
        out.rmse_series[name] = std::move(rmse);
        out.reconstructions[name] = std::move(res);
    }

    out.record.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return out;
}

MonteCarloResult run_monte_carlo(const ExperimentConfig& cfg) {
    cfg.validate();
    const FieldModel truth_model = make_truth_model(cfg);
    const FieldModel filter_model = make_filter_model(cfg);

    const int M = cfg.monte_carlo.runs;
    MonteCarloResult result;
    result.records.resize(M);
    std::vector<CovarianceHealth> run_health(M);

    std::atomic<int> next{0};
    auto worker = [&]() {
        for (int i = next.fetch_add(1); i < M; i = next.fetch_add(1)) {
            try {
                TwinResult twin = run_twin_experiment(cfg, i, truth_model, filter_model);
                for (const auto& [name, rec] : twin.reconstructions)
                    merge_health(run_health[i], rec.health);
                result.records[i] = std::move(twin.record);
            } catch (const std::exception& e) {
                result.records[i].run_index = i;
                result.records[i].failed = true;
                result.records[i].error = e.what();
            }
        }
    };

    const unsigned n_threads =
        std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), M));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n_threads; ++t)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }

    for (int i = 0; i < M; ++i) {
        if (result.records[i].failed)
            ++result.failed_runs;
        else
            merge_health(result.health, run_health[i]);
    }

    for (Scheme scheme : cfg.filter.schemes) {
        const std::string name = scheme_name(scheme);
        std::vector<int> truth_counts, recovered_counts;
        for (const RunRecord& rec : result.records) {
            if (rec.failed)
                continue;
            truth_counts.push_back(rec.truth_bumps);
            recovered_counts.push_back(rec.filter_bumps.at(name));
        }
        result.tables[name] = mismatch_table(truth_counts, recovered_counts);
    }
    return result;
}

SweepResult run_spacing_sweep(const ExperimentConfig& cfg) {
    if (cfg.sweep_spacings.empty())
        throw ConfigError("sweep.sensor_spacings: must be non-empty for a spacing sweep");
    SweepResult sweep;
    for (double dx : cfg.sweep_spacings) {
        ExperimentConfig point_cfg = cfg;
        point_cfg.observation.sensor_spacing = dx;
        MonteCarloResult mc = run_monte_carlo(point_cfg);
        SweepPoint point;
        point.sensor_spacing = dx;
        for (const auto& [name, table] : mc.tables)
            point.total_mismatch[name] = table.total_mismatch;
        merge_health(sweep.health, mc.health);
        sweep.points.push_back(std::move(point));
    }
    return sweep;
}

// ---- persistence ------------------------------------------------------

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj, bool include_fields) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    if (!include_fields || traj.fields_on_mesh.empty()) {
        out << "t";
        for (Eigen::Index k = 0; k < traj.states.front().size(); ++k)
            out << ",u_" << k;
        out << "\n";
        for (size_t i = 0; i < traj.times.size(); ++i) {
            out << format_double(traj.times[i]);
            for (Eigen::Index k = 0; k < traj.states[i].size(); ++k)
                out << ',' << format_double(traj.states[i][k]);
            out << "\n";
        }
    } else {
        out << "t";
        for (Eigen::Index k = 0; k < traj.fields_on_mesh.front().size(); ++k)
            out << ",x_" << k;
        out << "\n";
        for (size_t i = 0; i < traj.field_times.size(); ++i) {
            out << format_double(traj.field_times[i]);
            for (Eigen::Index k = 0; k < traj.fields_on_mesh[i].size(); ++k)
                out << ',' << format_double(traj.fields_on_mesh[i][k]);
            out << "\n";
        }
    }
}

void write_reconstruction_csv(const std::string& path, const FilterResult& result) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << "t,trace_P,innovation_norm,nis";
    for (Eigen::Index k = 0; k < result.steps.front().field_on_mesh.size(); ++k)
        out << ",x_" << k;
    out << "\n";
    for (const FilterStep& step : result.steps) {
        out << format_double(step.estimate.time) << ','
            << format_double(step.estimate.covariance.trace()) << ','
            << format_double(step.innovation_norm) << ','
            << format_double(step.normalized_innovation_sq);
        for (Eigen::Index k = 0; k < step.field_on_mesh.size(); ++k)
            out << ',' << format_double(step.field_on_mesh[k]);
        out << "\n";
    }
}

void write_records_csv(const std::string& path, const std::vector<RunRecord>& records,
                       const std::vector<std::string>& scheme_names) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << "run_index,seed,truth_bumps";
    for (const auto& name : scheme_names)
        out << ',' << name << "_bumps," << name << "_mean_rmse," << name << "_final_rmse";
    out << ",failed\n";
    for (const RunRecord& rec : records) {
        out << rec.run_index << ',' << rec.seed << ',' << rec.truth_bumps;
        for (const auto& name : scheme_names) {
            if (rec.failed) {
                out << ",,,";
            } else {
                out << ',' << rec.filter_bumps.at(name) << ','
                    << format_double(rec.mean_rmse.at(name)) << ','
                    << format_double(rec.final_rmse.at(name));
            }
        }
        out << ',' << (rec.failed ? 1 : 0) << "\n";
    }
}

// wall times live in their own file so records.csv stays byte-reproducible
void write_timings_csv(const std::string& path, const std::vector<RunRecord>& records) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << "run_index,wall_time_s\n";
    for (const RunRecord& rec : records)
        out << rec.run_index << ',' << format_double(rec.wall_time_s) << "\n";
}

void write_mismatch_csv(const std::string& path, const MismatchTable& table) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << "n_bumps,exact,recovered,mismatch\n";
    for (const MismatchRow& row : table.rows)
        out << row.n_bumps << ',' << row.exact_count << ',' << row.recovered_count << ','
            << row.mismatch << "\n";
    out << "total,,," << table.total_mismatch << "\n";
}

std::string mismatch_table_text(const std::map<std::string, MismatchTable>& tables) {
    std::ostringstream out;
    out << std::left << std::setw(8) << "Bumps" << std::setw(8) << "Exact";
    for (const auto& [name, table] : tables) {
        (void)table;
        out << std::setw(12) << (name + " Rec.") << std::setw(12) << (name + " Mis.");
    }
    out << "\n";
    size_t n_rows = 0;
    for (const auto& [name, table] : tables)
        n_rows = std::max(n_rows, table.rows.size());
    for (size_t r = 0; r < n_rows; ++r) {
        const MismatchRow* first = nullptr;
        for (const auto& [name, table] : tables)
            if (r < table.rows.size()) {
                first = &table.rows[r];
                break;
            }
        out << std::setw(8) << first->n_bumps << std::setw(8) << first->exact_count;
        for (const auto& [name, table] : tables) {
            if (r < table.rows.size())
                out << std::setw(12) << table.rows[r].recovered_count << std::setw(12)
                    << table.rows[r].mismatch;
            else
                out << std::setw(12) << 0 << std::setw(12) << 0;
        }
        out << "\n";
    }
    out << std::setw(8) << "Total" << std::setw(8) << "";
    for (const auto& [name, table] : tables)
        out << std::setw(12) << "" << std::setw(12) << table.total_mismatch;
    out << "\n";
    return out.str();
}

void write_sweep_csv(const std::string& path, const SweepResult& sweep,
                     const std::vector<std::string>& scheme_names) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << "sensor_spacing";
    for (const auto& name : scheme_names)
        out << ',' << name << "_total_mismatch";
    out << "\n";
    for (const SweepPoint& point : sweep.points) {
        out << format_double(point.sensor_spacing);
        for (const auto& name : scheme_names)
            out << ',' << point.total_mismatch.at(name);
        out << "\n";
    }
}

void write_field_csv(const std::string& path, const Vector& x, const Vector& field) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << "x,u\n";
    for (Eigen::Index i = 0; i < x.size(); ++i)
        out << format_double(x[i]) << ',' << format_double(field[i]) << "\n";
}

void persist_monte_carlo(const std::string& out_dir, const ExperimentConfig& cfg,
                         const MonteCarloResult& result) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    {
        std::ofstream out(out_dir + "/config.json");
        out << config_to_json(cfg);
    }
    std::vector<std::string> names;
    for (Scheme s : cfg.filter.schemes)
        names.push_back(scheme_name(s));
    write_records_csv(out_dir + "/records.csv", result.records, names);
    write_timings_csv(out_dir + "/timings.csv", result.records);
    for (const auto& [name, table] : result.tables)
        write_mismatch_csv(out_dir + "/mismatch_" + name + ".csv", table);
    {
        std::ofstream out(out_dir + "/mismatch_tables.txt");
        out << mismatch_table_text(result.tables);
    }
}

} // namespace sdnf
