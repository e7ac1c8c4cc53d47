#include "dirac/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dirac/errors.hpp"

namespace dirac {

namespace {

double field_energy(const Grid& grid, const Field& f) {
    return kernels::weighted_norm_sq_serial(grid.nx, grid.h, {f.data(), static_cast<std::size_t>(f.size())});
}

double energy_scale(const Geometry& g) { return std::pow(g.lapse(0.0), g.spatial_dim()); }

std::size_t exact_index(const Trajectory& traj, double t) {
    const std::size_t n = traj.index_of(t);
    require(std::abs(traj.times[n] - t) <= 1e-12 * std::max(1.0, std::abs(t)),
            "no snapshot at t = " + std::to_string(t));
    return n;
}

}  // namespace

double energy(const Trajectory& traj, std::size_t n) {
    require(n < traj.size(), "snapshot index out of range");
    double e = 0.0;
    for (const auto& f : traj.fields[n]) e += field_energy(traj.grid, f);
    return e / energy_scale(traj.geometry);
}

double boundary_flux(const Trajectory& traj, std::size_t n) {
    require(n < traj.size(), "snapshot index out of range");
    double s = 0.0;
    for (std::size_t m = 0; m < traj.modes.size(); ++m)
        s += build_operator(traj.geometry, traj.model, traj.grid, traj.modes[m], traj.times[n])
                 .boundary_flux(traj.fields[n][m]);
    return s;
}

double estimate_constant(const Geometry& g, double t0, double t1) { return 1.0 + g.lapse.max_on(t0, t1); }

double spacetime_norm_sq(const Source& f, const Geometry& g, const Grid& grid, double t0, double t1) {
    if (f.zero() || t1 <= t0) return 0.0;
    auto slice = [&](double t) {
        double s = 0.0;
        for (int k : g.modes()) s += field_energy(grid, f.evaluate(t, k, grid));
        return s * g.lapse(t) * slice_volume_factor(g, t);
    };
    // split at the envelope edges so the integrand is smooth on every piece
    std::vector<double> cuts{t0, t1};
    for (const auto& b : f.support()) {
        if (b.t0 > t0 && b.t0 < t1) cuts.push_back(b.t0);
        if (b.t1 > t0 && b.t1 < t1) cuts.push_back(b.t1);
    }
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j)
        if (cuts[j + 1] > cuts[j])
            total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(slice, cuts[j], cuts[j + 1], 15,
                                                                                     1e-12);
    return total;
}

EnergyEstimateReport check_energy_estimate(const Trajectory& traj, const Source& f, double t0, double t1,
                                           bool reversed) {
    require(t0 < t1, "energy estimate needs t0 < t1");
    EnergyEstimateReport r;
    r.t0 = t0;
    r.t1 = t1;
    r.reversed = reversed;
    r.constant = estimate_constant(traj.geometry, t0, t1);
    const double e0 = energy(traj, exact_index(traj, t0));
    const double e1 = energy(traj, exact_index(traj, t1));
    r.left = reversed ? e0 : e1;
    r.initial_term = reversed ? e1 : e0;
    r.source_term = spacetime_norm_sq(f, traj.geometry, traj.grid, t0, t1);
    r.right = std::exp(r.constant * (t1 - t0)) * (r.constant * r.source_term + r.initial_term);
    r.slack = r.left > 0.0 ? r.right / r.left : std::numeric_limits<double>::infinity();
    r.pass = r.left <= r.right * (1.0 + 1e-9);
    return r;
}

namespace {

CausalRegion future_of(const Geometry& g, const CausalRegion& seed, double t0, double t, bool radiate) {
    if (seed.empty() || t < t0) return {};
    const double tp = radiate ? hit_time(g, seed, t0, TimeDirection::Future) : 0.0;
    return causal_future(g, seed, t0, t, radiate, tp);
}

CausalRegion past_of(const Geometry& g, const CausalRegion& seed, double t0, double t, bool radiate) {
    if (seed.empty() || t > t0) return {};
    const double tm = radiate ? hit_time(g, seed, t0, TimeDirection::Past) : 0.0;
    return causal_past(g, seed, t0, t, radiate, tm);
}

}  // namespace

CausalRegion allowed_region(const Geometry& g, const CauchyData& data, double t, bool local_family) {
    const bool radiate = !local_family;
    const double len = g.length;
    CausalRegion out({}, len);
    const CausalRegion seed = data.psi0.support(len);
    if (t >= data.t_init) out = out.united(future_of(g, seed, data.t_init, t, radiate));
    if (t <= data.t_init) out = out.united(past_of(g, seed, data.t_init, t, radiate));
    for (const auto& b : data.source.support()) {
        const CausalRegion box({{b.x0, b.x1}}, len);
        // part of the source after t_init radiates forward, the part before it backward
        if (t >= data.t_init && b.t1 >= data.t_init) {
            const double start = std::max(b.t0, data.t_init);
            if (t >= start) out = out.united(future_of(g, box, start, t, radiate));
        }
        if (t <= data.t_init && b.t0 <= data.t_init) {
            const double start = std::min(b.t1, data.t_init);
            if (t <= start) out = out.united(past_of(g, box, start, t, radiate));
        }
    }
    return out;
}

SupportReport check_support(const Trajectory& traj, const CauchyData& data, bool local_family, double threshold) {
    require(threshold > 0.0 && threshold < 1.0, "support threshold must lie in (0, 1)");
    SupportReport rep;
    rep.threshold = threshold;
    rep.padding = 2.0 * traj.grid.h;
    rep.boundary_radiation = !local_family;
    const Grid& grid = traj.grid;
    for (std::size_t n = 0; n < traj.size(); ++n) {
        SupportSnapshot s;
        s.t = traj.times[n];
        s.allowed = allowed_region(traj.geometry, data, s.t, local_family).padded(rep.padding);
        std::vector<double> density(static_cast<std::size_t>(grid.nx), 0.0);
        for (const auto& f : traj.fields[n])
            for (int i = 0; i < grid.nx; ++i) density[static_cast<std::size_t>(i)] += f.segment<2>(2 * i).squaredNorm();
        double total = 0.0, outside = 0.0, peak = 0.0;
        for (int i = 0; i < grid.nx; ++i) {
            const double e = grid.weight(i) * density[static_cast<std::size_t>(i)];
            total += e;
            peak = std::max(peak, density[static_cast<std::size_t>(i)]);
            if (!s.allowed.contains(grid.x(i))) outside += e;
        }
        // runs of consecutive cells above the threshold
        std::vector<Interval> cells;
        for (int i = 0; i < grid.nx; ++i) {
            if (!(peak > 0.0 && density[static_cast<std::size_t>(i)] > threshold * peak)) continue;
            const bool extend = i > 0 && !cells.empty() && density[static_cast<std::size_t>(i - 1)] > threshold * peak;
            if (extend) cells.back().hi = grid.x(i) + 0.5 * grid.h;
            else cells.push_back({grid.x(i) - 0.5 * grid.h, grid.x(i) + 0.5 * grid.h});
        }
        s.measured = CausalRegion(std::move(cells), grid.length);
        s.violation = total > 0.0 ? outside / total : 0.0;
        rep.max_violation = std::max(rep.max_violation, s.violation);
        rep.snapshots.push_back(std::move(s));
    }
    rep.pass = rep.max_violation <= threshold;
    return rep;
}

double energy_fraction(const Grid& grid, const std::vector<Field>& fields, double a, double b) {
    double total = 0.0, part = 0.0;
    for (const auto& f : fields)
        for (int i = 0; i < grid.nx; ++i) {
            const double e = grid.weight(i) * f.segment<2>(2 * i).squaredNorm();
            total += e;
            if (grid.x(i) >= a && grid.x(i) <= b) part += e;
        }
    return total > 0.0 ? part / total : 0.0;
}

double energy_fraction(const Trajectory& traj, std::size_t n, double a, double b) {
    require(n < traj.size(), "snapshot index out of range");
    return energy_fraction(traj.grid, traj.fields[n], a, b);
}

}  // namespace dirac
