#pragma once

#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "dirac/boundary.hpp"
#include "dirac/clifford.hpp"
#include "dirac/geometry.hpp"
#include "dirac/kernels.hpp"

namespace dirac {

using Field = Eigen::VectorXcd;  // node-major spinor field, size 2 * nx
using SparseMat = Eigen::SparseMatrix<cplx>;

/// Uniform grid on [0, length] with the diagonal SBP norm (h/2 at both ends).
struct Grid {
    int nx = 0;
    double length = 1.0;
    double h = 0.0;

    static Grid make(int nx, double length = 1.0);
    double x(int i) const { return i * h; }
    double weight(int i) const { return (i == 0 || i == nx - 1) ? 0.5 * h : h; }
    int dofs() const { return 2 * nx; }
    /// Diagonal of the quadrature matrix, repeated per spinor component.
    Eigen::VectorXd dof_weights() const;
};

/// <u, v>_H = sum_i w_i u_i^* v_i
cplx h_inner(const Grid& g, const Field& u, const Field& v);
double h_norm(const Grid& g, const Field& u);

/// Per-mode spatial operator
///   D_{t,k} = N(t) (sigma(dx) D1 + i mu_k(t) sigma(e_theta)),
/// D1 = H^{-1} Q the second-order SBP derivative (first-order one-sided
/// boundary rows, Q + Q^T = diag(-1, 0, ..., 0, 1)).
class DiscreteOperator {
public:
    DiscreteOperator(Grid grid, const CliffordModel& model, double lapse, double mass, int mode, double t);

    const Grid& grid() const { return grid_; }
    int mode() const { return mode_; }
    double time() const { return t_; }
    double lapse() const { return coeffs_.scale; }
    double mass() const { return mu_; }
    const kernels::StencilCoeffs& coeffs() const { return coeffs_; }

    Field apply(const Field& psi) const;
    const SparseMat& sparse() const { return sparse_; }
    Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(sparse_); }

    /// <D u, v>_H - <u, D v>_H evaluated from boundary values only.
    cplx green_boundary_form(const Field& u, const Field& v) const;
    /// Rate of change of ||psi||_H^2 under d_t psi = -i D psi: i * green_boundary_form(psi, psi).
    double boundary_flux(const Field& psi) const;

private:
    Grid grid_;
    int mode_;
    double t_;
    double mu_;
    kernels::StencilCoeffs coeffs_;
    SparseMat sparse_;
};

DiscreteOperator build_operator(const Geometry& geometry, const CliffordModel& model, const Grid& grid, int mode,
                                double t);

/// Boundary trace (psi(0), psi(length)) in C^2 + C^2.
Eigen::Vector4cd trace(const Field& psi);

/// V_B = { psi : (id - P) trace(D^l psi) = 0, l < order }, with an
/// H-orthonormal basis computed on demand and the H-orthogonal projector kept
/// in sparse form.
class ConstraintSubspace {
public:
    ConstraintSubspace(const DiscreteOperator& op, const Mat4& projector, int order);

    int order() const { return order_; }
    int codimension() const { return static_cast<int>(rows_.cols()); }
    int dimension() const { return dofs_ - codimension(); }
    const SparseMat& projector() const { return projector_; }
    Field project(const Field& psi) const { return projector_ * psi; }
    /// max_j |row_j . psi| over the normalized constraint functionals.
    double constraint_residual(const Field& psi) const;
    /// Columns are H-orthonormal and span V_B.
    const Eigen::MatrixXcd& basis() const;
    const Grid& grid() const { return grid_; }

private:
    Grid grid_;
    int order_;
    int dofs_;
    Eigen::MatrixXcd rows_;  // orthonormal constraint vectors in H^{1/2}-scaled coordinates (dofs x codim)
    SparseMat projector_;
    mutable std::shared_ptr<Eigen::MatrixXcd> basis_;
};

ConstraintSubspace constraint_subspace(const DiscreteOperator& op, const Mat4& projector, int order = 1);

/// B^* H D B on V_B; Hermitian up to rounding when the boundary flux vanishes on V_B.
struct CompressedOperator {
    Eigen::MatrixXcd matrix;
    double hermitian_defect = 0.0;  // relative
};

CompressedOperator constrained_operator(const DiscreteOperator& op, const ConstraintSubspace& v,
                                        double max_defect = 1e-8);

/// Pi D Pi in full coordinates (sparse). This is the operator the time stepper uses.
SparseMat projected_operator(const DiscreteOperator& op, const ConstraintSubspace& v);

/// Eigendecomposition of the compressed operator plus the basis of V_B:
/// the dense functional calculus used by the mollifier and the dense oracle.
class SpectralCalculus {
public:
    SpectralCalculus(const DiscreteOperator& op, const ConstraintSubspace& v);

    const Eigen::VectorXd& eigenvalues() const { return lambda_; }
    const Eigen::MatrixXcd& eigenvectors() const { return u_; }
    const Eigen::MatrixXcd& basis() const { return basis_; }
    /// H-orthonormal eigenfunctions in full coordinates: basis() * eigenvectors().
    const Eigen::MatrixXcd& eigenfunctions() const { return phi_; }
    const Grid& grid() const { return grid_; }

    /// Coordinates of psi (projected onto V_B) in the eigenbasis.
    Eigen::VectorXcd to_eigen(const Field& psi) const;
    Field from_eigen(const Eigen::VectorXcd& c) const;
    /// f(D_B) psi for a scalar function f of the eigenvalue.
    template <class F>
    Field apply(F&& f, const Field& psi) const {
        Eigen::VectorXcd c = to_eigen(psi);
        for (Eigen::Index j = 0; j < c.size(); ++j) c(j) *= f(lambda_(j));
        return from_eigen(c);
    }
    /// Full-space matrix of f(D_B) composed with the H-orthogonal projection onto V_B.
    template <class F>
    Eigen::MatrixXcd full_matrix(F&& f) const {
        Eigen::VectorXcd d(lambda_.size());
        for (Eigen::Index j = 0; j < d.size(); ++j) d(j) = f(lambda_(j));
        return phi_ * d.asDiagonal() * phi_.adjoint() * weights_.asDiagonal();
    }

private:
    Grid grid_;
    Eigen::MatrixXcd basis_;
    Eigen::MatrixXcd u_;
    Eigen::MatrixXcd phi_;
    Eigen::VectorXcd weights_;
    Eigen::VectorXd lambda_;
};

/// J^(eps) psi = sum_j exp(-eps (1 + lambda_j^2)) <phi_j, psi>_H phi_j
Field mollifier_apply(const SpectralCalculus& calc, double epsilon, const Field& psi);

inline double mollifier_symbol(double epsilon, double lambda) { return std::exp(-epsilon * (1.0 + lambda * lambda)); }

struct ContinuityRow {
    double t0 = 0.0;
    double t1 = 0.0;
    double difference = 0.0;
};

/// ||D_{t_i,B} J^(eps)_{t_i} - D_{t_{i+1},B} J^(eps)_{t_{i+1}}|| for adjacent samples,
/// in the H operator norm (k_norm = 0) or the discrete H^1 norm (k_norm = 1),
/// maximized over modes.
std::vector<ContinuityRow> family_continuity_probe(const Geometry& geometry, const CliffordModel& model,
                                                   const ProjectorFamily& family, const Grid& grid, double t0,
                                                   double t1, int samples, double epsilon, int k_norm);

}  // namespace dirac
