#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdnf/ekf.hpp"
#include "sdnf/field_model.hpp"
#include "sdnf/sde.hpp"

namespace sdnf {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ModelConfig {
    double alpha = 1.0;
    double theta = 0.0;
    double epsilon = 0.05;
    double xi = 0.1;
    double half_length = 100.0;
    ConnectivityParams connectivity{};
    StimulusSpec stimulus{};
    FiringKind truth_firing = FiringKind::heaviside;
};

struct DiscretizationConfig {
    int n_modes = 50;        // K
    int n_subdivisions = 500; // N
    double h_t = 0.1;
    double horizon = 10.0;   // T
};

struct ObservationConfig {
    double sampling_period = 0.2; // Delta_t
    double sensor_spacing = 4.0;  // Delta_x
    double noise_variance = 1e-3; // diagonal of R
};

struct FilterBlockConfig {
    std::vector<Scheme> schemes = {Scheme::em05, Scheme::it15};
    int subdivisions = 1;
    double initial_cov_scale = 0.1;
    double surrogate_beta = 20.0;
};

struct MonteCarloConfig {
    int runs = 50;
    std::uint64_t master_seed = 1;
};

struct PatternConfig {
    int min_width = 3;
    bool periodic = true;
};

struct ExperimentConfig {
    ModelConfig model;
    DiscretizationConfig discretization;
    ObservationConfig observation;
    FilterBlockConfig filter;
    MonteCarloConfig monte_carlo;
    PatternConfig pattern;
    std::vector<double> sweep_spacings; // empty unless sweeping

    double mesh_step() const {
        return 2.0 * model.half_length / discretization.n_subdivisions;
    }

    /// Throws ConfigError naming the offending field.
    void validate() const;

    /// Restores the published experiment scale: M=500, K=100, N=1000.
    void apply_paper_scale();
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& cfg);

std::string scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

/// Builds the truth-simulation model (configured firing kind).
FieldModel make_truth_model(const ExperimentConfig& cfg);
/// Builds the filter model (logistic firing at the surrogate steepness).
FieldModel make_filter_model(const ExperimentConfig& cfg);

} // namespace sdnf
