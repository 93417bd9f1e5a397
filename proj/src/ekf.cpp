#include "sdnf/ekf.hpp"

#include <cmath>

namespace sdnf {

SensorLayout SensorLayout::build(const SpectralBasis& basis, double spacing) {
    const double h = basis.mesh.step;
    const double ratio = spacing / h;
    const int stride = static_cast<int>(std::llround(ratio));
    if (stride < 1 || std::abs(ratio - stride) > 1e-9 * stride)
        throw std::invalid_argument("sensor spacing must be a positive integer multiple of the mesh step");
    std::vector<int> idx;
    for (int i = 0; i <= basis.mesh.n_subdivisions; i += stride)
        idx.push_back(i);
    SensorLayout layout = from_indices(basis, std::move(idx));
    layout.spacing = spacing;
    return layout;
}

SensorLayout SensorLayout::from_indices(const SpectralBasis& basis, std::vector<int> indices) {
    if (indices.empty())
        throw std::invalid_argument("sensor layout needs at least one sensor");
    for (size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] < 0 || indices[i] > basis.mesh.n_subdivisions)
            throw std::invalid_argument("sensor index outside the mesh");
        if (i > 0 && indices[i] <= indices[i - 1])
            throw std::invalid_argument("sensor indices must be strictly increasing");
    }
    SensorLayout layout;
    layout.H.resize(static_cast<Eigen::Index>(indices.size()), basis.Vf.rows());
    for (size_t i = 0; i < indices.size(); ++i)
        layout.H.row(static_cast<Eigen::Index>(i)) = basis.Vf.col(indices[i]).transpose();
    layout.sensor_indices = std::move(indices);
    layout.spacing = layout.sensor_indices.size() > 1
                         ? basis.mesh.step * (layout.sensor_indices[1] - layout.sensor_indices[0])
                         : 0.0;
    return layout;
}

void condition_covariance(Matrix& P, CovarianceHealth& health) {
    // asymmetry is recorded relative to the covariance scale, otherwise the
    // metric just tracks trace(P)
    const double asym = (P - P.transpose()).cwiseAbs().maxCoeff() /
                        std::max(1.0, std::abs(P.trace()));
    health.max_asymmetry = std::max(health.max_asymmetry, asym);
    P = 0.5 * (P + P.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Matrix> es(P);
    const double tr = std::max(P.trace(), 0.0);
    const double min_eig = es.eigenvalues().minCoeff();
    if (tr > 0.0)
        health.worst_eig_ratio = std::min(health.worst_eig_ratio, min_eig / tr);
    if (min_eig < -1e-8 * tr) {
        ++health.clamp_events;
        Vector clamped = es.eigenvalues().cwiseMax(0.0);
        P = es.eigenvectors() * clamped.asDiagonal() * es.eigenvectors().transpose();
    }
}

namespace {

StateEstimate time_update(const StateEstimate& est, double dt, int subdivisions,
                          const FieldModel& model, Scheme scheme, CovarianceHealth* health) {
    if (subdivisions < 1)
        throw std::invalid_argument("subdivision count must be >= 1");
    const double delta = dt / subdivisions;
    const Eigen::Index n = est.mean.size();
    const Vector g = model.diffusion_diagonal();
    const Matrix GGt = (g.array().square()).matrix().asDiagonal();

    Vector u = est.mean;
    Matrix P = est.covariance;
    CovarianceHealth local;
    CovarianceHealth& h = health ? *health : local;

    for (int l = 0; l < subdivisions; ++l) {
        const double t = est.time + l * delta;
        if (scheme == Scheme::em05) {
            const Matrix J = model.drift_jacobian(t, u);
            // transition Jacobian of the Euler mean map u + delta f
            const Matrix A = Matrix::Identity(n, n) + delta * J;
            const Vector f = model.drift(t, u);
            P = A * P * A.transpose() + delta * GGt;
            u += delta * f;
        } else {
            const Matrix J = model.drift_jacobian(t, u);
            const Vector f = model.drift(t, u);
            const Vector L0f = model.basis().mesh.step *
                                   (model.basis().V * model.stimulus_time_derivative(t)) +
                               J * f;
            const Matrix Lf = J * g.asDiagonal();
            // J_fd = I + delta J + delta^2/2 J^2 (state dependence of J dropped)
            const Matrix Jfd = Matrix::Identity(n, n) + delta * J + 0.5 * delta * delta * (J * J);
            P = Jfd * P * Jfd.transpose() +
                0.5 * delta * delta * (g.asDiagonal() * Lf.transpose() + Lf * g.asDiagonal()) +
                (delta * delta * delta / 3.0) * (Lf * Lf.transpose()) + delta * GGt;
            u += delta * f + 0.5 * delta * delta * L0f;
        }
        condition_covariance(P, h);
        if (!u.allFinite())
            throw SimulationError("filter mean diverged during time update");
    }
    return {u, P, est.time + dt};
}

} // namespace

StateEstimate time_update_em(const StateEstimate& est, double dt, int subdivisions,
                             const FieldModel& model) {
    return time_update(est, dt, subdivisions, model, Scheme::em05, nullptr);
}

StateEstimate time_update_it15(const StateEstimate& est, double dt, int subdivisions,
                               const FieldModel& model) {
    return time_update(est, dt, subdivisions, model, Scheme::it15, nullptr);
}

StateEstimate measurement_update(const StateEstimate& pred, const Vector& z,
                                 const SensorLayout& layout, const Vector& noise_variances,
                                 double* normalized_innovation_sq) {
    const Matrix& H = layout.H;
    if (z.size() != H.rows())
        throw std::invalid_argument("measurement size does not match sensor layout");
    if ((noise_variances.array() <= 0.0).any())
        throw std::invalid_argument("measurement noise variances must be positive");

    Matrix Re = H * pred.covariance * H.transpose();
    Re.diagonal() += noise_variances;
    Eigen::LDLT<Matrix> ldlt(Re);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
        throw std::runtime_error("innovation covariance not positive (trace = " +
                                 std::to_string(Re.trace()) + ")");

    const Matrix K = ldlt.solve(H * pred.covariance).transpose();
    const Vector innovation = z - H * pred.mean;
    if (normalized_innovation_sq)
        *normalized_innovation_sq = innovation.dot(ldlt.solve(innovation));

    StateEstimate out;
    out.time = pred.time;
    out.mean = pred.mean + K * innovation;
    out.covariance = (Matrix::Identity(pred.mean.size(), pred.mean.size()) - K * H) * pred.covariance;
    return out;
}

FilterResult reconstruct(const MeasurementSet& meas, const FieldModel& model,
                         const FilterConfig& cfg, const Vector& u0_estimate) {
    if (meas.times.size() != meas.readings.size())
        throw std::invalid_argument("measurement times and readings differ in length");
    if (meas.times.empty())
        throw std::invalid_argument("empty measurement set");

    FilterResult result;
    result.steps.reserve(meas.times.size());

    const Eigen::Index n = u0_estimate.size();
    StateEstimate est{u0_estimate, cfg.initial_cov_scale * Matrix::Identity(n, n), 0.0};

    double prev_t = 0.0;
    for (size_t k = 0; k < meas.times.size(); ++k) {
        const double dt = meas.times[k] - prev_t;
        if (dt <= 0.0)
            throw std::invalid_argument("measurement times must be strictly increasing from 0");
        est = time_update(est, dt, cfg.subdivisions, model, cfg.scheme, &result.health);

        double nis = 0.0;
        const Vector innovation = meas.readings[k] - meas.layout.H * est.mean;
        est = measurement_update(est, meas.readings[k], meas.layout, meas.noise_variances, &nis);
        condition_covariance(est.covariance, result.health);

        FilterStep step;
        step.estimate = est;
        step.field_on_mesh = synthesize_field(est.mean, model.basis());
        step.innovation_norm = innovation.norm();
        step.normalized_innovation_sq = nis;
        result.steps.push_back(std::move(step));
        prev_t = meas.times[k];
    }
    return result;
}

} // namespace sdnf
