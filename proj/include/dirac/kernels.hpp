#pragma once

#include <span>

#include "dirac/clifford.hpp"

namespace dirac::kernels {

/// Coefficients of the per-mode spatial operator
///   (D psi)_i = scale * (gamma_x (D1 psi)_i + mass psi_i)
/// with D1 the second-order diagonal-norm SBP first derivative on a uniform grid.
struct StencilCoeffs {
    int nx = 0;
    double h = 0.0;
    double scale = 1.0;
    Mat2 gamma_x = Mat2::Zero();
    Mat2 mass = Mat2::Zero();
};

// Fields are node-major spinor arrays: entry 2*i + c is component c at node i.

void apply_dirac_serial(const StencilCoeffs& c, std::span<const cplx> in, std::span<cplx> out);
void apply_dirac_omp(const StencilCoeffs& c, std::span<const cplx> in, std::span<cplx> out);

/// sum_i w_i |psi_i|^2 with the SBP quadrature weights (h/2 at both ends).
double weighted_norm_sq_serial(int nx, double h, std::span<const cplx> psi);
double weighted_norm_sq_omp(int nx, double h, std::span<const cplx> psi);

/// Pointwise |psi_i|_0^2.
void energy_density_serial(std::span<const cplx> psi, std::span<double> out);
void energy_density_omp(std::span<const cplx> psi, std::span<double> out);

}  // namespace dirac::kernels
