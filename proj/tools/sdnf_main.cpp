#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sdnf/harness.hpp"

namespace {

using namespace sdnf;

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string scheme = "both";
    bool paper_scale = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("-c,--config", opts.config_path, "experiment config file (JSON)");
    cmd->add_option("-o,--out", opts.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--seed", opts.seed, "override the master seed")
        ->each([&](const std::string&) { opts.seed_set = true; });
    cmd->add_option("--scheme", opts.scheme, "filter scheme: em05, it15 or both")
        ->check(CLI::IsMember({"em05", "it15", "both"}))
        ->capture_default_str();
    cmd->add_flag("--paper-scale", opts.paper_scale,
                  "use the published experiment scale (M=500, K=100, N=1000)");
}

ExperimentConfig resolve_config(const CommonOpts& opts) {
    ExperimentConfig cfg =
        opts.config_path.empty() ? ExperimentConfig{} : load_config(opts.config_path);
    if (opts.paper_scale)
        cfg.apply_paper_scale();
    if (opts.seed_set)
        cfg.monte_carlo.master_seed = opts.seed;
    if (opts.scheme == "em05")
        cfg.filter.schemes = {Scheme::em05};
    else if (opts.scheme == "it15")
        cfg.filter.schemes = {Scheme::it15};
    else
        cfg.filter.schemes = {Scheme::em05, Scheme::it15};
    cfg.validate();
    return cfg;
}

std::vector<std::string> scheme_names(const ExperimentConfig& cfg) {
    std::vector<std::string> names;
    for (Scheme s : cfg.filter.schemes)
        names.push_back(scheme_name(s));
    return names;
}

int cmd_simulate(const CommonOpts& opts) {
    ExperimentConfig cfg = resolve_config(opts);
    const FieldModel model = make_truth_model(cfg);
    RngStream rng(cfg.monte_carlo.master_seed, 0, seed::kTruth);
    const int field_every = static_cast<int>(
        std::llround(cfg.observation.sampling_period / cfg.discretization.h_t));
    Trajectory traj = simulate_truth(model, Scheme::it15, cfg.discretization.h_t,
                                     cfg.discretization.horizon,
                                     Vector::Zero(cfg.discretization.n_modes + 1), rng,
                                     field_every);
    std::filesystem::create_directories(opts.out_dir);
    write_trajectory_csv(opts.out_dir + "/truth_coefficients.csv", traj, false);
    write_trajectory_csv(opts.out_dir + "/truth_fields.csv", traj, true);
    const BumpPattern p = count_bumps(traj.fields_on_mesh.back(), cfg.model.theta,
                                      cfg.pattern.min_width, cfg.pattern.periodic);
    std::cout << "simulated " << traj.times.size() - 1 << " steps; final field has " << p.count
              << " bump(s)\n";
    return 0;
}

int cmd_reconstruct(const CommonOpts& opts) {
    ExperimentConfig cfg = resolve_config(opts);
    TwinResult twin = run_twin_experiment(cfg, 0);
    std::filesystem::create_directories(opts.out_dir);
    write_trajectory_csv(opts.out_dir + "/truth_fields.csv", twin.truth, true);
    for (const auto& [name, res] : twin.reconstructions)
        write_reconstruction_csv(opts.out_dir + "/reconstruction_" + name + ".csv", res);
    std::cout << "truth bumps: " << twin.record.truth_bumps << "\n";
    for (const auto& [name, bumps] : twin.record.filter_bumps)
        std::cout << name << ": " << bumps << " bump(s), mean RMSE "
                  << format_double(twin.record.mean_rmse.at(name)) << ", final RMSE "
                  << format_double(twin.record.final_rmse.at(name)) << "\n";
    return 0;
}

int cmd_montecarlo(const CommonOpts& opts) {
    ExperimentConfig cfg = resolve_config(opts);
    MonteCarloResult result = run_monte_carlo(cfg);
    persist_monte_carlo(opts.out_dir, cfg, result);
    std::cout << mismatch_table_text(result.tables);
    if (result.failed_runs > 0)
        std::cout << "warning: " << result.failed_runs << " of " << cfg.monte_carlo.runs
                  << " runs failed (see records.csv)\n";
    return result.failed_runs == cfg.monte_carlo.runs ? 1 : 0;
}

int cmd_sweep(const CommonOpts& opts) {
    ExperimentConfig cfg = resolve_config(opts);
    if (cfg.sweep_spacings.empty())
        cfg.sweep_spacings = {4.0, 8.0, 12.0, 16.0, 20.0};
    SweepResult sweep = run_spacing_sweep(cfg);
    std::filesystem::create_directories(opts.out_dir);
    {
        std::ofstream out(opts.out_dir + "/config.json");
        out << config_to_json(cfg);
    }
    write_sweep_csv(opts.out_dir + "/sweep.csv", sweep, scheme_names(cfg));
    for (const SweepPoint& point : sweep.points) {
        std::cout << "dx=" << point.sensor_spacing;
        for (const auto& [name, total] : point.total_mismatch)
            std::cout << "  " << name << "=" << total;
        std::cout << "\n";
    }
    return 0;
}

int cmd_bumps(const std::string& field_csv, double theta, int min_width, bool no_periodic) {
    std::ifstream in(field_csv);
    if (!in) {
        std::cerr << "cannot open " << field_csv << "\n";
        return 1;
    }
    std::vector<double> values;
    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::stringstream ss(line);
        std::string x_str, u_str;
        std::getline(ss, x_str, ',');
        std::getline(ss, u_str, ',');
        values.push_back(std::stod(u_str));
    }
    Vector field = Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
    const BumpPattern p = count_bumps(field, theta, min_width, !no_periodic);
    std::cout << p.count << " bump(s)\n";
    for (const auto& [a, b] : p.intervals)
        std::cout << "  nodes [" << a << ", " << b << "]" << (b < a ? " (wraps)" : "") << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic neural field simulation and EKF reconstruction"};
    app.require_subcommand(1);

    CommonOpts sim_opts, rec_opts, mc_opts, sweep_opts;
    CLI::App* sim = app.add_subcommand("simulate", "simulate a reference trajectory");
    add_common(sim, sim_opts);
    CLI::App* rec = app.add_subcommand("reconstruct", "run a single twin experiment");
    add_common(rec, rec_opts);
    CLI::App* mc = app.add_subcommand("montecarlo", "Monte Carlo pattern-recognition study");
    add_common(mc, mc_opts);
    CLI::App* sweep = app.add_subcommand("sweep", "mismatch totals over sensor spacings");
    add_common(sweep, sweep_opts);

    std::string bumps_file;
    double bumps_theta = 0.0;
    int bumps_min_width = 3;
    bool bumps_no_periodic = false;
    CLI::App* bumps = app.add_subcommand("bumps", "count bumps in a field CSV (columns x,u)");
    bumps->add_option("file", bumps_file, "field CSV file")->required();
    bumps->add_option("--theta", bumps_theta, "activity threshold")->capture_default_str();
    bumps->add_option("--min-width", bumps_min_width, "minimum bump width in nodes")
        ->capture_default_str();
    bumps->add_flag("--no-periodic", bumps_no_periodic, "disable periodic boundary merging");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed())
            return cmd_simulate(sim_opts);
        if (rec->parsed())
            return cmd_reconstruct(rec_opts);
        if (mc->parsed())
            return cmd_montecarlo(mc_opts);
        if (sweep->parsed())
            return cmd_sweep(sweep_opts);
        if (bumps->parsed())
            return cmd_bumps(bumps_file, bumps_theta, bumps_min_width, bumps_no_periodic);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
