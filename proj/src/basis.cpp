#include "sdnf/basis.hpp"

#include <cmath>
#include <numbers>

namespace sdnf {

SpatialMesh SpatialMesh::build(double L, int N) {
    if (L <= 0.0)
        throw std::invalid_argument("mesh half-length must be positive");
    if (N < 2)
        throw std::invalid_argument("mesh needs at least 2 subdivisions");
    SpatialMesh m;
    m.half_length = L;
    m.n_subdivisions = N;
    m.step = 2.0 * L / N;
    m.nodes = Vector::LinSpaced(N + 1, -L, L);
    return m;
}

double eigenvalue(int l, double xi) {
    if (xi <= 0.0)
        throw std::domain_error("correlation length must be positive");
    const double e = xi * xi * static_cast<double>(l) * static_cast<double>(l);
    return std::exp(-e / (8.0 * std::numbers::pi));
}

SpectralBasis build_basis(double L, int N, int K, double xi) {
    if (K < 1)
        throw std::invalid_argument("need at least one cosine mode");
    if (N < 2 * K)
        throw std::invalid_argument("mesh too coarse for the requested modes (need N >= 2K)");

    SpectralBasis b;
    b.n_modes = K;
    b.mesh = SpatialMesh::build(L, N);
    b.correlation_length = xi;

    b.Vf.resize(K + 1, N + 1);
    b.Vf.row(0).setConstant(1.0 / std::sqrt(2.0 * L));
    const double inv_sqrt_L = 1.0 / std::sqrt(L);
    for (int k = 1; k <= K; ++k)
        for (int i = 0; i <= N; ++i)
            b.Vf(k, i) = inv_sqrt_L * std::cos(k * std::numbers::pi * b.mesh.nodes[i] / L);

    b.V = b.Vf.leftCols(N);

    b.lambda.resize(K + 1);
    for (int k = 0; k <= K; ++k)
        b.lambda[k] = eigenvalue(k, xi);

    return b;
}

Vector project_initial(const Vector& u0_on_mesh, const SpectralBasis& basis) {
    if (u0_on_mesh.size() != basis.Vf.cols())
        throw std::invalid_argument("initial profile length does not match mesh");

    const Matrix normal = basis.Vf * basis.Vf.transpose();
    Eigen::LLT<Matrix> llt(normal);
    if (llt.info() != Eigen::Success) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(normal);
        const double lo = es.eigenvalues().minCoeff();
        const double hi = es.eigenvalues().maxCoeff();
        throw std::runtime_error("normal matrix Vf*Vf^T is not SPD (eigenvalue range [" +
                                 std::to_string(lo) + ", " + std::to_string(hi) + "])");
    }
    return llt.solve(basis.Vf * u0_on_mesh);
}

Vector synthesize_field(const Vector& u, const SpectralBasis& basis) {
    if (u.size() != basis.Vf.rows())
        throw std::invalid_argument("coefficient vector does not match basis size");
    return basis.Vf.transpose() * u;
}

} // namespace sdnf
