#pragma once

#include <optional>
#include <vector>

#include "sdnf/field_model.hpp"
#include "sdnf/rng.hpp"
#include "sdnf/types.hpp"

namespace sdnf {

enum class Scheme { em05, it15 };

struct SimulationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> states;
    // populated at requested instants only (memory guard)
    std::vector<double> field_times;
    std::vector<Vector> fields_on_mesh;
};

/// One Euler-Maruyama step: u + delta f + sqrt(delta) G zeta, G = eps diag(lambda).
Vector em_step(double t, const Vector& u, double delta, const FieldModel& model,
               const Vector& zeta);

struct ItoOperators {
    Vector L0f; // h_x V dI/dt + J f
    Matrix Lf;  // column j = eps lambda_j [J]_j
};

ItoOperators ito_operators(double t, const Vector& u, const FieldModel& model);

/// Deterministic part of the order-1.5 step: u + delta f + delta^2/2 L0f.
Vector it15_deterministic(double t, const Vector& u, double delta, const FieldModel& model);

/// Full order-1.5 step with the correlated increment pair
/// dW = sqrt(delta) zeta1, dZ = delta^{3/2}/2 (zeta1 + zeta2/sqrt(3)).
Vector it15_step(double t, const Vector& u, double delta, const FieldModel& model,
                 const Vector& zeta1, const Vector& zeta2);

/// Reference trajectory on the grid {0, h_t, ..., T}.  Fields on the full
/// mesh are stored only at multiples of field_every (in steps; 0 disables,
/// the final state is always included when enabled).
Trajectory simulate_truth(const FieldModel& model, Scheme scheme, double h_t, double T,
                          const Vector& u0, RngStream& rng, int field_every = 0);

} // namespace sdnf
