// Serial reference kernels against their OpenMP counterparts.
#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include <omp.h>

#include "dirac/clifford.hpp"
#include "dirac/kernels.hpp"

using namespace dirac;

namespace {

template <class F>
double best_of(int reps, F&& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

}  // namespace

int main() {
    const CliffordModel model = make_clifford_model(2);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    std::printf("threads %d\n", omp_get_max_threads());
    std::printf("%-16s %10s %12s %12s %8s %12s\n", "kernel", "nx", "serial_s", "omp_s", "speedup", "max_diff");
    for (int nx : {1 << 10, 1 << 14, 1 << 18, 1 << 20}) {
        kernels::StencilCoeffs c;
        c.nx = nx;
        c.h = 1.0 / (nx - 1);
        c.scale = 1.3;
        c.gamma_x = model.gamma_x;
        c.mass = cplx(0.0, 1.5) * *model.gamma_theta;
        std::vector<cplx> in(2 * static_cast<std::size_t>(nx)), a(in.size()), b(in.size());
        for (auto& v : in) v = cplx(nd(rng), nd(rng));
        const int reps = nx > (1 << 16) ? 5 : 200;

        const double ts = best_of(reps, [&] { kernels::apply_dirac_serial(c, in, a); });
        const double tp = best_of(reps, [&] { kernels::apply_dirac_omp(c, in, b); });
        double diff = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
        std::printf("%-16s %10d %12.3e %12.3e %8.2f %12.3e\n", "apply_dirac", nx, ts, tp, ts / tp, diff);

        double ns = 0.0, np = 0.0;
        const double ts2 = best_of(reps, [&] { ns = kernels::weighted_norm_sq_serial(nx, c.h, in); });
        const double tp2 = best_of(reps, [&] { np = kernels::weighted_norm_sq_omp(nx, c.h, in); });
        std::printf("%-16s %10d %12.3e %12.3e %8.2f %12.3e\n", "weighted_norm", nx, ts2, tp2, ts2 / tp2,
                    std::abs(ns - np) / ns);

        std::vector<double> da(static_cast<std::size_t>(nx)), db(da.size());
        const double ts3 = best_of(reps, [&] { kernels::energy_density_serial(in, da); });
        const double tp3 = best_of(reps, [&] { kernels::energy_density_omp(in, db); });
        double d3 = 0.0;
        for (std::size_t i = 0; i < da.size(); ++i) d3 = std::max(d3, std::abs(da[i] - db[i]));
        std::printf("%-16s %10d %12.3e %12.3e %8.2f %12.3e\n", "energy_density", nx, ts3, tp3, ts3 / tp3, d3);
    }
    return 0;
}
