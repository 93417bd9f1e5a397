#include "sdnf/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace sdnf {

using nlohmann::json;

namespace {

void require(bool ok, const std::string& field, const std::string& why) {
    if (!ok)
        throw ConfigError(field + ": " + why);
}

bool is_integer_multiple(double value, double unit) {
    const double ratio = value / unit;
    return std::abs(ratio - std::llround(ratio)) < 1e-9 * std::max(1.0, std::abs(ratio));
}

template <typename T>
void get_if_present(const json& j, const char* key, T& out) {
    if (j.contains(key))
        out = j.at(key).get<T>();
}

} // namespace

void ExperimentConfig::validate() const {
    require(model.alpha > 0, "model.alpha", "must be positive");
    require(model.epsilon >= 0, "model.epsilon", "must be non-negative");
    require(model.xi > 0, "model.xi", "must be positive");
    require(model.half_length > 0, "model.half_length", "must be positive");
    require(model.connectivity.decay > 0, "model.connectivity.decay", "must be positive");
    require(model.connectivity.wavelength > 0, "model.connectivity.wavelength", "must be positive");
    require(model.stimulus.width > 0, "model.stimulus.width", "must be positive");
    require(model.stimulus.switch_time >= 0 && model.stimulus.switch_time <= discretization.horizon,
            "model.stimulus.switch_time", "must lie in [0, horizon]");

    require(discretization.n_modes >= 1, "discretization.n_modes", "must be >= 1");
    require(discretization.n_subdivisions >= 2 * discretization.n_modes,
            "discretization.n_subdivisions", "must be >= 2 * n_modes");
    require(discretization.h_t > 0, "discretization.h_t", "must be positive");
    require(discretization.horizon > 0, "discretization.horizon", "must be positive");

    require(observation.sampling_period > 0, "observation.sampling_period", "must be positive");
    require(observation.noise_variance > 0, "observation.noise_variance", "must be positive");
    require(is_integer_multiple(observation.sampling_period, discretization.h_t),
            "observation.sampling_period", "must be an integer multiple of h_t");
    require(is_integer_multiple(discretization.horizon, observation.sampling_period),
            "discretization.horizon", "must be an integer multiple of the sampling period");
    require(observation.sensor_spacing > 0, "observation.sensor_spacing", "must be positive");
    require(is_integer_multiple(observation.sensor_spacing, mesh_step()),
            "observation.sensor_spacing", "must be an integer multiple of the mesh step");
    for (double dx : sweep_spacings) {
        require(dx > 0, "sweep.sensor_spacings", "entries must be positive");
        require(is_integer_multiple(dx, mesh_step()),
                "sweep.sensor_spacings", "entries must be integer multiples of the mesh step");
    }

    require(!filter.schemes.empty(), "filter.schemes", "must name at least one scheme");
    require(filter.subdivisions >= 1, "filter.subdivisions", "must be >= 1");
    require(filter.initial_cov_scale > 0, "filter.initial_cov_scale", "must be positive");
    require(filter.surrogate_beta > 0, "filter.surrogate_beta", "must be positive");

    require(monte_carlo.runs >= 1, "monte_carlo.runs", "must be >= 1");
    require(pattern.min_width >= 1, "pattern.min_width", "must be >= 1");
}

void ExperimentConfig::apply_paper_scale() {
    monte_carlo.runs = 500;
    discretization.n_modes = 100;
    discretization.n_subdivisions = 1000;
}

std::string scheme_name(Scheme s) {
    return s == Scheme::em05 ? "em05" : "it15";
}

Scheme scheme_from_name(const std::string& name) {
    if (name == "em05")
        return Scheme::em05;
    if (name == "it15")
        return Scheme::it15;
    throw ConfigError("scheme: unknown value '" + name + "' (expected em05 or it15)");
}

ExperimentConfig parse_config_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }

    ExperimentConfig cfg;
    if (j.contains("model")) {
        const json& m = j["model"];
        get_if_present(m, "alpha", cfg.model.alpha);
        get_if_present(m, "theta", cfg.model.theta);
        get_if_present(m, "epsilon", cfg.model.epsilon);
        get_if_present(m, "xi", cfg.model.xi);
        get_if_present(m, "half_length", cfg.model.half_length);
        if (m.contains("connectivity")) {
            const json& c = m["connectivity"];
            get_if_present(c, "amplitude", cfg.model.connectivity.amplitude);
            get_if_present(c, "decay", cfg.model.connectivity.decay);
            get_if_present(c, "wavelength", cfg.model.connectivity.wavelength);
        }
        if (m.contains("stimulus")) {
            const json& s = m["stimulus"];
            get_if_present(s, "baseline_on", cfg.model.stimulus.baseline_on);
            get_if_present(s, "baseline_off", cfg.model.stimulus.baseline_off);
            get_if_present(s, "amplitude", cfg.model.stimulus.amplitude);
            get_if_present(s, "center", cfg.model.stimulus.center);
            get_if_present(s, "width", cfg.model.stimulus.width);
            get_if_present(s, "switch_time", cfg.model.stimulus.switch_time);
        }
        if (m.contains("truth_firing")) {
            const std::string kind = m["truth_firing"].get<std::string>();
            if (kind == "heaviside")
                cfg.model.truth_firing = FiringKind::heaviside;
            else if (kind == "logistic")
                cfg.model.truth_firing = FiringKind::logistic;
            else
                throw ConfigError("model.truth_firing: unknown value '" + kind + "'");
        }
    }
    if (j.contains("discretization")) {
        const json& d = j["discretization"];
        get_if_present(d, "n_modes", cfg.discretization.n_modes);
        get_if_present(d, "n_subdivisions", cfg.discretization.n_subdivisions);
        get_if_present(d, "h_t", cfg.discretization.h_t);
        get_if_present(d, "horizon", cfg.discretization.horizon);
        if (d.contains("h_x")) {
            const double hx = d["h_x"].get<double>();
            if (std::abs(hx - cfg.mesh_step()) > 1e-9 * hx)
                throw ConfigError("discretization.h_x: inconsistent with 2*half_length/n_subdivisions");
        }
    }
    if (j.contains("observation")) {
        const json& o = j["observation"];
        get_if_present(o, "sampling_period", cfg.observation.sampling_period);
        get_if_present(o, "sensor_spacing", cfg.observation.sensor_spacing);
        get_if_present(o, "noise_variance", cfg.observation.noise_variance);
    }
    if (j.contains("filter")) {
        const json& f = j["filter"];
        if (f.contains("schemes")) {
            cfg.filter.schemes.clear();
            for (const auto& s : f["schemes"])
                cfg.filter.schemes.push_back(scheme_from_name(s.get<std::string>()));
        }
        get_if_present(f, "subdivisions", cfg.filter.subdivisions);
        get_if_present(f, "initial_cov_scale", cfg.filter.initial_cov_scale);
        get_if_present(f, "surrogate_beta", cfg.filter.surrogate_beta);
    }
    if (j.contains("monte_carlo")) {
        const json& mc = j["monte_carlo"];
        get_if_present(mc, "runs", cfg.monte_carlo.runs);
        get_if_present(mc, "master_seed", cfg.monte_carlo.master_seed);
    }
    if (j.contains("pattern")) {
        const json& p = j["pattern"];
        get_if_present(p, "min_width", cfg.pattern.min_width);
        get_if_present(p, "periodic", cfg.pattern.periodic);
    }
    if (j.contains("sweep")) {
        const json& s = j["sweep"];
        if (s.contains("sensor_spacings"))
            cfg.sweep_spacings = s["sensor_spacings"].get<std::vector<double>>();
    }

    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_json(buf.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["model"] = {
        {"alpha", cfg.model.alpha},
        {"theta", cfg.model.theta},
        {"epsilon", cfg.model.epsilon},
        {"xi", cfg.model.xi},
        {"half_length", cfg.model.half_length},
        {"connectivity",
         {{"amplitude", cfg.model.connectivity.amplitude},
          {"decay", cfg.model.connectivity.decay},
          {"wavelength", cfg.model.connectivity.wavelength}}},
        {"stimulus",
         {{"baseline_on", cfg.model.stimulus.baseline_on},
          {"baseline_off", cfg.model.stimulus.baseline_off},
          {"amplitude", cfg.model.stimulus.amplitude},
          {"center", cfg.model.stimulus.center},
          {"width", cfg.model.stimulus.width},
          {"switch_time", cfg.model.stimulus.switch_time}}},
        {"truth_firing", cfg.model.truth_firing == FiringKind::heaviside ? "heaviside" : "logistic"},
    };
    j["discretization"] = {
        {"n_modes", cfg.discretization.n_modes},
        {"n_subdivisions", cfg.discretization.n_subdivisions},
        {"h_x", cfg.mesh_step()},
        {"h_t", cfg.discretization.h_t},
        {"horizon", cfg.discretization.horizon},
    };
    j["observation"] = {
        {"sampling_period", cfg.observation.sampling_period},
        {"sensor_spacing", cfg.observation.sensor_spacing},
        {"noise_variance", cfg.observation.noise_variance},
    };
    json schemes = json::array();
    for (Scheme s : cfg.filter.schemes)
        schemes.push_back(scheme_name(s));
    j["filter"] = {
        {"schemes", schemes},
        {"subdivisions", cfg.filter.subdivisions},
        {"initial_cov_scale", cfg.filter.initial_cov_scale},
        {"surrogate_beta", cfg.filter.surrogate_beta},
    };
    j["monte_carlo"] = {
        {"runs", cfg.monte_carlo.runs},
        {"master_seed", cfg.monte_carlo.master_seed},
    };
    j["pattern"] = {
        {"min_width", cfg.pattern.min_width},
        {"periodic", cfg.pattern.periodic},
    };
    if (!cfg.sweep_spacings.empty())
        j["sweep"] = {{"sensor_spacings", cfg.sweep_spacings}};
    return j.dump(2) + "\n";
}

FieldModel make_truth_model(const ExperimentConfig& cfg) {
    SpectralBasis basis = build_basis(cfg.model.half_length, cfg.discretization.n_subdivisions,
                                      cfg.discretization.n_modes, cfg.model.xi);
    FiringRate firing;
    firing.kind = cfg.model.truth_firing;
    firing.threshold = cfg.model.theta;
    firing.steepness = cfg.filter.surrogate_beta;
    firing.surrogate_beta = cfg.filter.surrogate_beta;
    return FieldModel(cfg.model.alpha, firing, cfg.model.epsilon, std::move(basis),
                      cfg.model.connectivity, cfg.model.stimulus);
}

FieldModel make_filter_model(const ExperimentConfig& cfg) {
    SpectralBasis basis = build_basis(cfg.model.half_length, cfg.discretization.n_subdivisions,
                                      cfg.discretization.n_modes, cfg.model.xi);
    FiringRate firing;
    firing.kind = FiringKind::logistic;
    firing.threshold = cfg.model.theta;
    firing.steepness = cfg.filter.surrogate_beta;
    firing.surrogate_beta = cfg.filter.surrogate_beta;
    return FieldModel(cfg.model.alpha, firing, cfg.model.epsilon, std::move(basis),
                      cfg.model.connectivity, cfg.model.stimulus);
}

} // namespace sdnf
