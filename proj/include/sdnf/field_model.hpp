#pragma once

#include <stdexcept>

#include "sdnf/basis.hpp"
#include "sdnf/types.hpp"

namespace sdnf {

/// Lateral connectivity kernel F(d) = A1 e^{-k1 d} [k1 sin(pi d / k2) + cos(pi d / k2)].
struct ConnectivityParams {
    double amplitude = 2.0; // A1
    double decay = 0.08;    // k1
    double wavelength = 10.0; // k2
};

double connectivity(double d, const ConnectivityParams& p);

/// Gaussian-plus-baseline external stimulus, switched off after switch_time:
///   I(x,t) = baseline_on + A exp(-(x-C)^2 / 2 sigma^2)   for t <= switch_time
///   I(x,t) = baseline_off                                 afterwards
struct StimulusSpec {
    double baseline_on = -3.39967;
    double baseline_off = -2.89967;
    double amplitude = 8.0; // A
    double center = 0.0;    // C
    double width = 3.0;     // sigma
    double switch_time = 5.0;
};

Vector stimulus(const Vector& x_nodes, double t, const StimulusSpec& s);

enum class FiringKind { heaviside, logistic };

/// Firing-rate function S(u - theta).  The Heaviside kind returns 1 for
/// u >= theta and has no usable derivative; its derivative() falls back to
/// the logistic surrogate with steepness surrogate_beta so that Jacobians
/// stay informative.
struct FiringRate {
    FiringKind kind = FiringKind::heaviside;
    double threshold = 0.0;    // theta
    double steepness = 20.0;   // beta, logistic kind
    double surrogate_beta = 20.0; // derivative surrogate for heaviside

    double value(double u) const;
    double derivative(double u) const;
};

/// The projected SDNF physics: decay, firing rate, connectivity matrix and
/// stimulus, evaluated in spectral coordinates.
///
/// F is the N x N kernel sample matrix F(|x_j - x_i|) over the first N mesh
/// nodes; VF = h_x^2 V F is cached because it is the hot factor of both the
/// drift and the Jacobian.
class FieldModel {
public:
    FieldModel(double alpha, FiringRate firing, double noise_level,
               SpectralBasis basis, ConnectivityParams kernel, StimulusSpec stim);

    /// f(t,u) = h_x V I(x,t) - alpha u + h_x^2 V F s,  s_i = S(u^T V_i - theta).
    Vector drift(double t, const Vector& u) const;

    /// J = -alpha I + h_x^2 V F diag(S') V^T.
    Matrix drift_jacobian(double t, const Vector& u) const;

    /// dI/dt on the first N nodes (zero for the piecewise-constant-in-time stimulus).
    Vector stimulus_time_derivative(double t) const;

    Vector stimulus_on_nodes(double t) const;

    double alpha() const { return alpha_; }
    double noise_level() const { return noise_level_; }
    const FiringRate& firing() const { return firing_; }
    const SpectralBasis& basis() const { return basis_; }
    const Matrix& kernel_matrix() const { return F_; }
    const ConnectivityParams& kernel_params() const { return kernel_; }
    const StimulusSpec& stimulus_spec() const { return stimulus_; }

    /// Diffusion matrix diagonal: G = eps * diag(lambda).
    Vector diffusion_diagonal() const { return noise_level_ * basis_.lambda; }

private:
    double alpha_;
    FiringRate firing_;
    double noise_level_;
    SpectralBasis basis_;
    ConnectivityParams kernel_;
    StimulusSpec stimulus_;
    Matrix F_;  // N x N
    Matrix VF_; // (K+1) x N, h_x^2 V F
};

} // namespace sdnf
