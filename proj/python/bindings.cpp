#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sdnf/harness.hpp"

namespace py = pybind11;
using namespace sdnf;

PYBIND11_MODULE(_sdnf, m) {
    m.doc() = "Stochastic neural field simulation and EKF reconstruction";

    // -- spectral basis --------------------------------------------------
    py::class_<SpatialMesh>(m, "SpatialMesh")
        .def_readonly("half_length", &SpatialMesh::half_length)
        .def_readonly("n_subdivisions", &SpatialMesh::n_subdivisions)
        .def_readonly("step", &SpatialMesh::step)
        .def_readonly("nodes", &SpatialMesh::nodes);

    py::class_<SpectralBasis>(m, "SpectralBasis")
        .def_readonly("n_modes", &SpectralBasis::n_modes)
        .def_readonly("mesh", &SpectralBasis::mesh)
        .def_readonly("correlation_length", &SpectralBasis::correlation_length)
        .def_readonly("Vf", &SpectralBasis::Vf)
        .def_readonly("V", &SpectralBasis::V)
        .def_readonly("noise_amplitudes", &SpectralBasis::lambda);

    m.def("eigenvalue", &eigenvalue, py::arg("l"), py::arg("xi"));
    m.def("build_basis", &build_basis, py::arg("half_length"), py::arg("n_subdivisions"),
          py::arg("n_modes"), py::arg("xi"));
    m.def("project_initial", &project_initial, py::arg("u0_on_mesh"), py::arg("basis"));
    m.def("synthesize_field", &synthesize_field, py::arg("u"), py::arg("basis"));

    // -- field model -----------------------------------------------------
    py::class_<ConnectivityParams>(m, "ConnectivityParams")
        .def(py::init<>())
        .def_readwrite("amplitude", &ConnectivityParams::amplitude)
        .def_readwrite("decay", &ConnectivityParams::decay)
        .def_readwrite("wavelength", &ConnectivityParams::wavelength);

    py::class_<StimulusSpec>(m, "StimulusSpec")
        .def(py::init<>())
        .def_readwrite("baseline_on", &StimulusSpec::baseline_on)
        .def_readwrite("baseline_off", &StimulusSpec::baseline_off)
        .def_readwrite("amplitude", &StimulusSpec::amplitude)
        .def_readwrite("center", &StimulusSpec::center)
        .def_readwrite("width", &StimulusSpec::width)
        .def_readwrite("switch_time", &StimulusSpec::switch_time);

    py::enum_<FiringKind>(m, "FiringKind")
        .value("heaviside", FiringKind::heaviside)
        .value("logistic", FiringKind::logistic);

    py::class_<FiringRate>(m, "FiringRate")
        .def(py::init<>())
        .def_readwrite("kind", &FiringRate::kind)
        .def_readwrite("threshold", &FiringRate::threshold)
        .def_readwrite("steepness", &FiringRate::steepness)
        .def_readwrite("surrogate_beta", &FiringRate::surrogate_beta)
        .def("value", &FiringRate::value)
        .def("derivative", &FiringRate::derivative);

    m.def("connectivity", &connectivity, py::arg("d"), py::arg("params"));
    m.def("stimulus", &stimulus, py::arg("x_nodes"), py::arg("t"), py::arg("spec"));

    py::class_<FieldModel>(m, "FieldModel")
        .def(py::init<double, FiringRate, double, SpectralBasis, ConnectivityParams,
                      StimulusSpec>(),
             py::arg("alpha"), py::arg("firing"), py::arg("noise_level"), py::arg("basis"),
             py::arg("kernel"), py::arg("stimulus"))
        .def("drift", &FieldModel::drift, py::arg("t"), py::arg("u"))
        .def("drift_jacobian", &FieldModel::drift_jacobian, py::arg("t"), py::arg("u"))
        .def_property_readonly("basis", &FieldModel::basis)
        .def_property_readonly("kernel_matrix", &FieldModel::kernel_matrix);

    // -- SDE integrators -------------------------------------------------
    py::enum_<Scheme>(m, "Scheme").value("em05", Scheme::em05).value("it15", Scheme::it15);

    m.def("em_step", &em_step, py::arg("t"), py::arg("u"), py::arg("delta"), py::arg("model"),
          py::arg("zeta"));
    m.def("it15_step", &it15_step, py::arg("t"), py::arg("u"), py::arg("delta"),
          py::arg("model"), py::arg("zeta1"), py::arg("zeta2"));
    m.def(
        "simulate_truth",
        [](const FieldModel& model, Scheme scheme, double h_t, double T, const Vector& u0,
           std::uint64_t seed, int field_every) {
            RngStream rng(seed);
            return simulate_truth(model, scheme, h_t, T, u0, rng, field_every);
        },
        py::arg("model"), py::arg("scheme"), py::arg("h_t"), py::arg("horizon"), py::arg("u0"),
        py::arg("seed"), py::arg("field_every") = 0);

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("times", &Trajectory::times)
        .def_readonly("states", &Trajectory::states)
        .def_readonly("field_times", &Trajectory::field_times)
        .def_readonly("fields_on_mesh", &Trajectory::fields_on_mesh);

    // -- pattern scoring -------------------------------------------------
    py::class_<BumpPattern>(m, "BumpPattern")
        .def_readonly("count", &BumpPattern::count)
        .def_readonly("intervals", &BumpPattern::intervals)
        .def_readonly("threshold_used", &BumpPattern::threshold_used)
        .def_readonly("wrapped", &BumpPattern::wrapped);

    m.def("count_bumps", &count_bumps, py::arg("field"), py::arg("theta"),
          py::arg("min_width") = 3, py::arg("periodic") = true);

    py::class_<MismatchRow>(m, "MismatchRow")
        .def_readonly("n_bumps", &MismatchRow::n_bumps)
        .def_readonly("exact_count", &MismatchRow::exact_count)
        .def_readonly("recovered_count", &MismatchRow::recovered_count)
        .def_readonly("mismatch", &MismatchRow::mismatch);

    py::class_<MismatchTable>(m, "MismatchTable")
        .def_readonly("rows", &MismatchTable::rows)
        .def_readonly("total_mismatch", &MismatchTable::total_mismatch)
        .def_readonly("per_run_disagreements", &MismatchTable::per_run_disagreements);

    m.def("mismatch_table", &mismatch_table, py::arg("truth_counts"),
          py::arg("recovered_counts"));

    // -- experiments -----------------------------------------------------
    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init<>())
        .def("validate", &ExperimentConfig::validate)
        .def("apply_paper_scale", &ExperimentConfig::apply_paper_scale)
        .def("to_json", [](const ExperimentConfig& c) { return config_to_json(c); })
        .def_static("from_json", &parse_config_json)
        .def_property(
            "sigma", [](const ExperimentConfig& c) { return c.model.stimulus.width; },
            [](ExperimentConfig& c, double v) { c.model.stimulus.width = v; })
        .def_property(
            "epsilon", [](const ExperimentConfig& c) { return c.model.epsilon; },
            [](ExperimentConfig& c, double v) { c.model.epsilon = v; })
        .def_property(
            "runs", [](const ExperimentConfig& c) { return c.monte_carlo.runs; },
            [](ExperimentConfig& c, int v) { c.monte_carlo.runs = v; })
        .def_property(
            "master_seed", [](const ExperimentConfig& c) { return c.monte_carlo.master_seed; },
            [](ExperimentConfig& c, std::uint64_t v) { c.monte_carlo.master_seed = v; })
        .def_property(
            "sensor_spacing",
            [](const ExperimentConfig& c) { return c.observation.sensor_spacing; },
            [](ExperimentConfig& c, double v) { c.observation.sensor_spacing = v; });

    py::class_<RunRecord>(m, "RunRecord")
        .def_readonly("run_index", &RunRecord::run_index)
        .def_readonly("seed", &RunRecord::seed)
        .def_readonly("truth_bumps", &RunRecord::truth_bumps)
        .def_readonly("filter_bumps", &RunRecord::filter_bumps)
        .def_readonly("mean_rmse", &RunRecord::mean_rmse)
        .def_readonly("final_rmse", &RunRecord::final_rmse)
        .def_readonly("failed", &RunRecord::failed);

    py::class_<TwinResult>(m, "TwinResult")
        .def_readonly("truth", &TwinResult::truth)
        .def_readonly("rmse_series", &TwinResult::rmse_series)
        .def_readonly("record", &TwinResult::record);

    py::class_<MonteCarloResult>(m, "MonteCarloResult")
        .def_readonly("tables", &MonteCarloResult::tables)
        .def_readonly("records", &MonteCarloResult::records)
        .def_readonly("failed_runs", &MonteCarloResult::failed_runs);

    m.def("run_twin_experiment",
          py::overload_cast<const ExperimentConfig&, int>(&run_twin_experiment),
          py::arg("config"), py::arg("run_index") = 0,
          py::call_guard<py::gil_scoped_release>());
    m.def("run_monte_carlo", &run_monte_carlo, py::arg("config"),
          py::call_guard<py::gil_scoped_release>());

    m.def("make_truth_model", &make_truth_model, py::arg("config"));
    m.def("make_filter_model", &make_filter_model, py::arg("config"));
}
