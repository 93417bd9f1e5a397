#pragma once

#include <stdexcept>

#include "sdnf/types.hpp"

namespace sdnf {

/// Equidistant mesh on the symmetric domain [-L, L] with N subdivisions
/// (N+1 nodes), x[0] = -L, x[N] = +L.
struct SpatialMesh {
    double half_length = 0.0; // L
    int n_subdivisions = 0;   // N
    double step = 0.0;        // h_x = 2L/N
    Vector nodes;             // length N+1

    static SpatialMesh build(double L, int N);
};

/// Cosine eigenbasis of the noise covariance operator evaluated on a mesh.
///
/// Vf is (K+1)x(N+1) with row k holding v_k at all nodes; V drops the last
/// column (the x = +L node duplicates x = -L under periodicity).  lambda
/// holds the diagonal noise amplitudes lambda_k.
struct SpectralBasis {
    int n_modes = 0; // K
    SpatialMesh mesh;
    double correlation_length = 0.0; // xi
    Matrix Vf;
    Matrix V;
    Vector lambda;
};

/// lambda_l = exp(-xi^2 l^2 / (8 pi)).  Throws std::domain_error for xi <= 0.
double eigenvalue(int l, double xi);

/// Builds the basis.  Requires L > 0, K >= 1 and N >= 2K (the spectral
/// truncation must be well resolved by the mesh).
SpectralBasis build_basis(double L, int N, int K, double xi);

/// Least-squares spectral coefficients of a mesh profile:
/// u = (Vf Vf^T)^{-1} Vf u0.  Throws std::runtime_error if the normal
/// matrix is numerically singular.
Vector project_initial(const Vector& u0_on_mesh, const SpectralBasis& basis);

/// Membrane potential on the full mesh: Vf^T u.
Vector synthesize_field(const Vector& u, const SpectralBasis& basis);

} // namespace sdnf
