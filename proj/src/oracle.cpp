#include "dirac/oracle.hpp"

#include <cmath>

#include "dirac/errors.hpp"
#include "dirac/functions.hpp"

namespace dirac {

namespace {
constexpr cplx I{0.0, 1.0};
}

Vec2 BumpProfile::value(double x) const { return amplitude * smooth_bump((x - center) / half_width); }

void BumpProfile::validate(double length) const {
    require(half_width > 0.0, "bump half width must be positive");
    require(center - half_width > 0.0 && center + half_width < length,
            "bump support must lie strictly inside (0, length)");
}

Vec2 InitialData::value(int mode, double x) const {
    Vec2 v = Vec2::Zero();
    for (const auto& b : bumps)
        if (b.mode == mode) v += b.value(x);
    return v;
}

Field InitialData::sample(const Grid& grid, int mode) const {
    Field f(grid.dofs());
    for (int i = 0; i < grid.nx; ++i) f.segment<2>(2 * i) = value(mode, grid.x(i));
    return f;
}

CausalRegion InitialData::support(double length) const {
    std::vector<Interval> iv;
    for (const auto& b : bumps) iv.push_back(b.support());
    return CausalRegion(std::move(iv), length);
}

Vec2 exact_transmission(const InitialData& psi0, double s, double x, double length) {
    const Mat2 m_minus = (Mat2() << 1, -1, -1, 1).finished();
    const Mat2 m_plus = (Mat2() << 1, 1, 1, 1).finished();
    // psi0 lives on (0, L): y = x + kL +- s must land there
    auto sum_over_shifts = [&](double shift) {
        Vec2 acc = Vec2::Zero();
        const double y0 = x + shift;
        const long kmin = static_cast<long>(std::floor(-y0 / length)) - 1;
        const long kmax = static_cast<long>(std::ceil((length - y0) / length)) + 1;
        for (long k = kmin; k <= kmax; ++k) {
            const double y = y0 + k * length;
            if (y > 0.0 && y < length) acc += psi0.value(0, y);
        }
        return acc;
    };
    return 0.5 * (m_minus * sum_over_shifts(+s) + m_plus * sum_over_shifts(-s));
}

Field exact_transmission_field(const InitialData& psi0, double s, const Grid& grid) {
    Field f(grid.dofs());
    for (int i = 0; i < grid.nx; ++i) f.segment<2>(2 * i) = exact_transmission(psi0, s, grid.x(i), grid.length);
    return f;
}

FormulaResidualReport verify_formula_solves(const InitialData& psi0, const CliffordModel& model, int samples,
                                            double step, std::uint64_t seed, double length) {
    FormulaResidualReport rep;
    rep.samples = samples;
    rep.step = step;
    const Mat2 gen = model.hamiltonian_generator();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ut(-2.0, 2.0), ux(step, length - step);
    double peak = 0.0;
    for (const auto& b : psi0.bumps) peak = std::max(peak, b.amplitude.norm());
    for (int n = 0; n < samples; ++n) {
        const double t = ut(rng), x = ux(rng);
        const Vec2 dt = (exact_transmission(psi0, t + step, x, length) - exact_transmission(psi0, t - step, x, length)) /
                        (2.0 * step);
        const Vec2 dx = (exact_transmission(psi0, t, x + step, length) - exact_transmission(psi0, t, x - step, length)) /
                        (2.0 * step);
        rep.max_residual = std::max(rep.max_residual, (dt + gen * dx).norm() / std::max(peak, 1e-300));
        rep.max_identification = std::max(
            rep.max_identification, (exact_transmission(psi0, t, 0.0, length) - exact_transmission(psi0, t, length, length)).norm());
    }
    return rep;
}

Field dense_oracle(const SpectralCalculus& calc, const Field& psi0, double t) {
    return calc.apply([t](double lam) { return std::exp(-I * lam * t); }, psi0);
}

}  // namespace dirac
