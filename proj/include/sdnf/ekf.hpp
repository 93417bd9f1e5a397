#pragma once

#include <vector>

#include "sdnf/field_model.hpp"
#include "sdnf/sde.hpp"
#include "sdnf/types.hpp"

namespace sdnf {

struct StateEstimate {
    Vector mean;
    Matrix covariance;
    double time = 0.0;
};

/// Sparse sensor placement: selected mesh node indices and the induced
/// observation matrix H (rows are the matching columns of Vf).
struct SensorLayout {
    std::vector<int> sensor_indices;
    Matrix H; // m x (K+1)
    double spacing = 0.0; // Delta_x

    static SensorLayout build(const SpectralBasis& basis, double spacing);
    static SensorLayout from_indices(const SpectralBasis& basis, std::vector<int> indices);
};

struct MeasurementSet {
    std::vector<double> times; // constant spacing Delta_t
    SensorLayout layout;
    std::vector<Vector> readings;
    Vector noise_variances; // diagonal of R
};

struct FilterConfig {
    Scheme scheme = Scheme::em05;
    int subdivisions = 1; // L, delta = Delta_t / L
    double initial_cov_scale = 0.1; // Pi_0 = scale * I
    double firing_surrogate_beta = 20.0;
};

/// Numerical-conditioning record for a filter run: P is re-symmetrized
/// after every update and negative eigenvalues are clamped at zero when
/// they exceed tolerance.
struct CovarianceHealth {
    int clamp_events = 0;
    double worst_eig_ratio = 0.0;  // most negative min-eigenvalue / trace seen
    double max_asymmetry = 0.0;    // max |P - P^T| / max(1, |tr P|) before re-symmetrization
};

struct FilterStep {
    StateEstimate estimate;
    Vector field_on_mesh;
    double innovation_norm = 0.0;
    double normalized_innovation_sq = 0.0; // innovation^T R_e^{-1} innovation
};

struct FilterResult {
    std::vector<FilterStep> steps;
    CovarianceHealth health;
};

StateEstimate time_update_em(const StateEstimate& est, double dt, int subdivisions,
                             const FieldModel& model);
StateEstimate time_update_it15(const StateEstimate& est, double dt, int subdivisions,
                               const FieldModel& model);

StateEstimate measurement_update(const StateEstimate& pred, const Vector& z,
                                 const SensorLayout& layout, const Vector& noise_variances,
                                 double* normalized_innovation_sq = nullptr);

/// Runs the chosen continuous-discrete EKF over a measurement history and
/// reconstructs the field Vf^T u_hat on the full mesh at every sampling
/// instant.
FilterResult reconstruct(const MeasurementSet& meas, const FieldModel& model,
                         const FilterConfig& cfg, const Vector& u0_estimate);

/// Re-symmetrizes P and clamps negative eigenvalues, accumulating health
/// statistics.  Exposed for tests.
void condition_covariance(Matrix& P, CovarianceHealth& health);

} // namespace sdnf
