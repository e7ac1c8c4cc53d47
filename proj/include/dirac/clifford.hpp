#pragma once

#include <array>
#include <complex>
#include <optional>

#include <Eigen/Dense>

namespace dirac {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Vec2 = Eigen::Vector2cd;

/// Gamma matrices of the two desk spacetimes, signature (-,+,...,+).
///
/// The representation is fixed so that the Hamiltonian generator
/// gamma(nu)^{-1} gamma(e_x) is the real symmetric matrix [[0,1],[1,0]]:
///   gamma(nu)    = sigma_z
///   gamma(e_x)   = i sigma_y
///   gamma(e_th)  = i sigma_x      (cylinder only)
/// The spinor form <.,.>_SM has Gram matrix sigma_z, so that
/// <gamma(nu) u, v>_SM is the standard Hermitian product.
struct CliffordModel {
    Mat2 gamma_t;
    Mat2 gamma_x;
    std::optional<Mat2> gamma_theta;
    Mat2 sm_gram;
    int dim_n = 1;

    /// <u, v>_SM = u^* G v
    cplx sm_product(const Vec2& u, const Vec2& v) const { return u.dot(sm_gram * v); }
    /// <u, v>_0 = <gamma(nu) u, v>_SM
    cplx zero_product(const Vec2& u, const Vec2& v) const { return (gamma_t * u).dot(sm_gram * v); }
    /// Gram matrix of <.,.>_0.
    Mat2 zero_gram() const { return gamma_t.adjoint() * sm_gram; }
    /// gamma(nu)^{-1} gamma(e_x); transports data as d_t psi + G d_x psi = 0.
    Mat2 hamiltonian_generator() const { return gamma_t.inverse() * gamma_x; }
};

CliffordModel make_clifford_model(int dim_n);

/// A covector on Sigma written in the orthonormal coframe (dx, r dtheta).
struct Covector {
    double x = 0.0;
    double theta = 0.0;
};

/// Principal symbol of the induced spatial operator: -i gamma(nu) gamma(direction).
/// Requires unit length; the result squares to -id.
Mat2 spatial_symbol(const CliffordModel& model, Covector direction);

/// Boundary symbols of the two boundary components (x = 0 and x = length),
/// evaluated on the inward unit conormal.
struct BoundarySymbol {
    std::array<Mat2, 2> sigma_eta;
    std::array<int, 2> orientation_sign{+1, -1};
};

BoundarySymbol boundary_symbol(const CliffordModel& model);

/// Pauli matrices, shared by tests and builders.
Mat2 pauli_x();
Mat2 pauli_y();
Mat2 pauli_z();

}  // namespace dirac
