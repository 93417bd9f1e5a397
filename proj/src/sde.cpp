#include "sdnf/sde.hpp"

#include <cmath>

namespace sdnf {

namespace {

void check_finite(const Vector& u, const char* what) {
    if (!u.allFinite())
        throw SimulationError(std::string("non-finite ") + what + " during integration");
}

} // namespace

Vector em_step(double t, const Vector& u, double delta, const FieldModel& model,
               const Vector& zeta) {
    const Vector f = model.drift(t, u);
    check_finite(f, "drift");
    const Vector g = model.diffusion_diagonal();
    return u + delta * f + std::sqrt(delta) * g.cwiseProduct(zeta);
}

ItoOperators ito_operators(double t, const Vector& u, const FieldModel& model) {
    const Matrix J = model.drift_jacobian(t, u);
    const Vector f = model.drift(t, u);
    ItoOperators ops;
    ops.L0f = model.basis().mesh.step * (model.basis().V * model.stimulus_time_derivative(t)) + J * f;
    ops.Lf = J * model.diffusion_diagonal().asDiagonal();
    return ops;
}

Vector it15_deterministic(double t, const Vector& u, double delta, const FieldModel& model) {
    const Vector f = model.drift(t, u);
    check_finite(f, "drift");
    const ItoOperators ops = ito_operators(t, u, model);
    return u + delta * f + 0.5 * delta * delta * ops.L0f;
}

Vector it15_step(double t, const Vector& u, double delta, const FieldModel& model,
                 const Vector& zeta1, const Vector& zeta2) {
    const Vector f = model.drift(t, u);
    check_finite(f, "drift");
    const ItoOperators ops = ito_operators(t, u, model);
    const Vector fd = u + delta * f + 0.5 * delta * delta * ops.L0f;

    const double sqrt_delta = std::sqrt(delta);
    const Vector dW = sqrt_delta * zeta1;
    const Vector dZ = 0.5 * delta * sqrt_delta * (zeta1 + zeta2 / std::sqrt(3.0));

    const Vector g = model.diffusion_diagonal();
    Vector next = fd + g.cwiseProduct(dW) + ops.Lf * dZ;
    check_finite(next, "state");
    return next;
}

Trajectory simulate_truth(const FieldModel& model, Scheme scheme, double h_t, double T,
                          const Vector& u0, RngStream& rng, int field_every) {
    if (h_t <= 0.0 || T <= 0.0)
        throw std::invalid_argument("step size and horizon must be positive");

    const Eigen::Index dim = u0.size();
    const int n_steps = static_cast<int>(std::llround(T / h_t));

    Trajectory traj;
    traj.times.reserve(n_steps + 1);
    traj.states.reserve(n_steps + 1);
    traj.times.push_back(0.0);
    traj.states.push_back(u0);

    auto maybe_record_field = [&](int step_index, double t, const Vector& u) {
        if (field_every <= 0)
            return;
        if (step_index % field_every == 0 || step_index == n_steps) {
            traj.field_times.push_back(t);
            traj.fields_on_mesh.push_back(synthesize_field(u, model.basis()));
        }
    };
    maybe_record_field(0, 0.0, u0);

    Vector u = u0;
    for (int k = 0; k < n_steps; ++k) {
        const double t = k * h_t;
        if (scheme == Scheme::em05) {
            u = em_step(t, u, h_t, model, rng.normal_vector(dim));
        } else {
            const Vector z1 = rng.normal_vector(dim);
            const Vector z2 = rng.normal_vector(dim);
            u = it15_step(t, u, h_t, model, z1, z2);
        }
        if (u.lpNorm<Eigen::Infinity>() > 1e6)
            throw SimulationError("trajectory diverged at t = " + std::to_string((k + 1) * h_t) +
                                  " (|u|_inf > 1e6); check the configuration");
        traj.times.push_back((k + 1) * h_t);
        traj.states.push_back(u);
        maybe_record_field(k + 1, (k + 1) * h_t, u);
    }
    return traj;
}

} // namespace sdnf
