#include "sdnf/field_model.hpp"

#include <cmath>
#include <numbers>

namespace sdnf {

double connectivity(double d, const ConnectivityParams& p) {
    const double phase = std::numbers::pi * d / p.wavelength;
    return p.amplitude * std::exp(-p.decay * d) *
           (p.decay * std::sin(phase) + std::cos(phase));
}

Vector stimulus(const Vector& x_nodes, double t, const StimulusSpec& s) {
    if (t > s.switch_time)
        return Vector::Constant(x_nodes.size(), s.baseline_off);
    Vector out(x_nodes.size());
    const double two_sigma2 = 2.0 * s.width * s.width;
    for (Eigen::Index i = 0; i < x_nodes.size(); ++i) {
        const double dx = x_nodes[i] - s.center;
        out[i] = s.baseline_on + s.amplitude * std::exp(-dx * dx / two_sigma2);
    }
    return out;
}

double FiringRate::value(double u) const {
    switch (kind) {
    case FiringKind::heaviside:
        // strict inequality: with U0 = theta = 0 the at-threshold tie decides
        // between the quiescent and the homogeneous all-firing solution, and
        // only the quiescent branch produces the localized bump patterns
        return u > threshold ? 1.0 : 0.0;
    case FiringKind::logistic:
        return 1.0 / (1.0 + std::exp(-steepness * (u - threshold)));
    }
    return 0.0;
}

double FiringRate::derivative(double u) const {
    const double beta = kind == FiringKind::heaviside ? surrogate_beta : steepness;
    const double s = 1.0 / (1.0 + std::exp(-beta * (u - threshold)));
    return beta * s * (1.0 - s);
}

FieldModel::FieldModel(double alpha, FiringRate firing, double noise_level,
                       SpectralBasis basis, ConnectivityParams kernel, StimulusSpec stim)
    : alpha_(alpha), firing_(firing), noise_level_(noise_level),
      basis_(std::move(basis)), kernel_(kernel), stimulus_(stim) {
    if (alpha_ <= 0.0)
        throw std::invalid_argument("decay rate alpha must be positive");
    if (noise_level_ < 0.0)
        throw std::invalid_argument("noise level must be non-negative");
    if (kernel_.decay <= 0.0 || kernel_.wavelength <= 0.0)
        throw std::invalid_argument("kernel decay and wavelength must be positive");
    if (stimulus_.width <= 0.0)
        throw std::invalid_argument("stimulus width must be positive");

    const int N = basis_.mesh.n_subdivisions;
    const Vector& x = basis_.mesh.nodes;
    F_.resize(N, N);
    for (int i = 0; i < N; ++i) {
        F_(i, i) = connectivity(0.0, kernel_);
        for (int j = i + 1; j < N; ++j) {
            const double v = connectivity(std::abs(x[j] - x[i]), kernel_);
            F_(i, j) = v;
            F_(j, i) = v;
        }
    }
    const double h = basis_.mesh.step;
    VF_ = (h * h) * (basis_.V * F_);
}

Vector FieldModel::stimulus_on_nodes(double t) const {
    const int N = basis_.mesh.n_subdivisions;
    return stimulus(basis_.mesh.nodes.head(N), t, stimulus_);
}

Vector FieldModel::stimulus_time_derivative(double t) const {
    (void)t;
    return Vector::Zero(basis_.mesh.n_subdivisions);
}

Vector FieldModel::drift(double t, const Vector& u) const {
    if (!u.allFinite())
        throw std::invalid_argument("drift called with non-finite state");
    const Vector field = basis_.V.transpose() * u; // potential at nodes 0..N-1
    Vector s(field.size());
    for (Eigen::Index i = 0; i < field.size(); ++i)
        s[i] = firing_.value(field[i]);
    return basis_.mesh.step * (basis_.V * stimulus_on_nodes(t)) - alpha_ * u + VF_ * s;
}

Matrix FieldModel::drift_jacobian(double t, const Vector& u) const {
    (void)t;
    const Vector field = basis_.V.transpose() * u;
    Vector sprime(field.size());
    for (Eigen::Index i = 0; i < field.size(); ++i)
        sprime[i] = firing_.derivative(field[i]);
    Matrix J = VF_ * sprime.asDiagonal() * basis_.V.transpose();
    J.diagonal().array() -= alpha_;
    return J;
}

} // namespace sdnf
