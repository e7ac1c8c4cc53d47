#include <doctest.h>

#include <random>
#include <vector>

#include "dirac/clifford.hpp"
#include "dirac/kernels.hpp"

using namespace dirac;

TEST_SUITE("kernels") {

TEST_CASE("OpenMP kernels agree with the serial references") {
    const CliffordModel model = make_clifford_model(2);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> nd;
    for (int nx : {16, 257, 4096}) {
        kernels::StencilCoeffs c;
        c.nx = nx;
        c.h = 1.0 / (nx - 1);
        c.scale = 0.7;
        c.gamma_x = model.gamma_x;
        c.mass = cplx(0.0, 2.5) * *model.gamma_theta;
        std::vector<cplx> in(2 * static_cast<std::size_t>(nx)), a(in.size()), b(in.size());
        for (auto& v : in) v = cplx(nd(rng), nd(rng));
        kernels::apply_dirac_serial(c, in, a);
        kernels::apply_dirac_omp(c, in, b);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);

        const double s = kernels::weighted_norm_sq_serial(nx, c.h, in);
        const double p = kernels::weighted_norm_sq_omp(nx, c.h, in);
        CHECK(std::abs(s - p) <= 1e-13 * s);

        std::vector<double> da(static_cast<std::size_t>(nx)), db(da.size());
        kernels::energy_density_serial(in, da);
        kernels::energy_density_omp(in, db);
        CHECK(da == db);
    }
}

TEST_CASE("derivative stencil is exact on linear data") {
    const int nx = 33;
    kernels::StencilCoeffs c;
    c.nx = nx;
    c.h = 1.0 / (nx - 1);
    c.gamma_x = Mat2::Identity();
    std::vector<cplx> in(2 * nx), out(2 * nx);
    for (int i = 0; i < nx; ++i) in[2 * i] = in[2 * i + 1] = cplx(3.0 * i * c.h - 1.0, 0.0);
    kernels::apply_dirac_serial(c, in, out);
    for (const auto& v : out) CHECK(std::abs(v - 3.0) < 1e-12);
}

}
