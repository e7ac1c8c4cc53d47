#include "dirac/kernels.hpp"

#include <cassert>

namespace dirac::kernels {

namespace {

inline void stencil_row(const StencilCoeffs& c, const cplx* u, cplx* out, int i) {
    const int n = c.nx;
    cplx d0, d1;
    if (i == 0) {
        d0 = (u[2] - u[0]) / c.h;
        d1 = (u[3] - u[1]) / c.h;
    } else if (i == n - 1) {
        d0 = (u[2 * i] - u[2 * i - 2]) / c.h;
        d1 = (u[2 * i + 1] - u[2 * i - 1]) / c.h;
    } else {
        d0 = (u[2 * i + 2] - u[2 * i - 2]) / (2.0 * c.h);
        d1 = (u[2 * i + 3] - u[2 * i - 1]) / (2.0 * c.h);
    }
    const cplx a0 = u[2 * i], a1 = u[2 * i + 1];
    out[2 * i] = c.scale * (c.gamma_x(0, 0) * d0 + c.gamma_x(0, 1) * d1 + c.mass(0, 0) * a0 + c.mass(0, 1) * a1);
    out[2 * i + 1] =
        c.scale * (c.gamma_x(1, 0) * d0 + c.gamma_x(1, 1) * d1 + c.mass(1, 0) * a0 + c.mass(1, 1) * a1);
}

inline double weight(int i, int n, double h) { return (i == 0 || i == n - 1) ? 0.5 * h : h; }

}  // namespace

void apply_dirac_serial(const StencilCoeffs& c, std::span<const cplx> in, std::span<cplx> out) {
    assert(in.size() == std::size_t(2 * c.nx) && out.size() == in.size());
    for (int i = 0; i < c.nx; ++i) stencil_row(c, in.data(), out.data(), i);
}

void apply_dirac_omp(const StencilCoeffs& c, std::span<const cplx> in, std::span<cplx> out) {
    assert(in.size() == std::size_t(2 * c.nx) && out.size() == in.size());
    const cplx* u = in.data();
    cplx* o = out.data();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < c.nx; ++i) stencil_row(c, u, o, i);
}

double weighted_norm_sq_serial(int nx, double h, std::span<const cplx> psi) {
    double s = 0.0;
    for (int i = 0; i < nx; ++i) s += weight(i, nx, h) * (std::norm(psi[2 * i]) + std::norm(psi[2 * i + 1]));
    return s;
}

double weighted_norm_sq_omp(int nx, double h, std::span<const cplx> psi) {
    double s = 0.0;
    const cplx* p = psi.data();
#pragma omp parallel for reduction(+ : s) schedule(static)
    for (int i = 0; i < nx; ++i) s += weight(i, nx, h) * (std::norm(p[2 * i]) + std::norm(p[2 * i + 1]));
    return s;
}

void energy_density_serial(std::span<const cplx> psi, std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::norm(psi[2 * i]) + std::norm(psi[2 * i + 1]);
}

void energy_density_omp(std::span<const cplx> psi, std::span<double> out) {
    const cplx* p = psi.data();
    double* o = out.data();
    const long n = static_cast<long>(out.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) o[i] = std::norm(p[2 * i]) + std::norm(p[2 * i + 1]);
}

}  // namespace dirac::kernels
