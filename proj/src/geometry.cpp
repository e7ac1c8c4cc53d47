#include "dirac/geometry.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dirac/errors.hpp"

namespace dirac {

Geometry Geometry::strip(double length) {
    Geometry g;
    g.kind = GeometryKind::Strip;
    g.length = length;
    return g;
}

Geometry Geometry::cylinder(int mode_cutoff, TimeFunction radius, double length) {
    Geometry g;
    g.kind = GeometryKind::Cylinder;
    g.length = length;
    g.mode_cutoff = mode_cutoff;
    g.radius = std::move(radius);
    return g;
}

std::vector<int> Geometry::modes() const {
    if (kind == GeometryKind::Strip) return {0};
    std::vector<int> out;
    for (int k = -mode_cutoff; k <= mode_cutoff; ++k) out.push_back(k);
    return out;
}

double Geometry::mode_mass(int k, double t) const {
    if (kind == GeometryKind::Strip) return 0.0;
    return (k + 0.5) / radius(t);
}

void Geometry::validate(double t0, double t1) const {
    require(length > 0.0, "geometry length must be positive");
    require(lapse.min_on(t0, t1) > 0.0, "lapse must stay positive on the window");
    if (kind == GeometryKind::Cylinder) {
        require(mode_cutoff >= 0, "mode cutoff must be non-negative");
        require(radius.min_on(t0, t1) > 0.0, "radius must stay positive on the window");
    }
}

double proper_time(const Geometry& g, double t0, double t1) {
    require(t0 <= t1, "proper_time: t0 <= t1 required");
    if (t0 == t1) return 0.0;
    if (g.lapse.is_constant()) return g.lapse(t0) * (t1 - t0);
    double err = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [&](double t) { return g.lapse(t); }, t0, t1, 8, 1e-13, &err);
    return v;
}

double time_at_proper_distance(const Geometry& g, double t0, double distance, int direction) {
    require(distance >= 0.0, "proper distance must be non-negative");
    if (distance == 0.0) return t0;
    auto s = [&](double t) { return direction > 0 ? proper_time(g, t0, t) : proper_time(g, t, t0); };
    // bracket by doubling
    double step = distance / std::max(g.lapse(t0), 1e-3);
    double far = t0 + direction * step;
    while (s(far) < distance) {
        step *= 2.0;
        far = t0 + direction * step;
    }
    double near = t0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (near + far);
        if (s(mid) < distance) near = mid;
        else far = mid;
        if (std::abs(far - near) < 1e-15 * std::max(1.0, std::abs(t0))) break;
    }
    return 0.5 * (near + far);
}

CausalRegion::CausalRegion(std::vector<Interval> intervals, double length) : length_(length) {
    std::vector<Interval> clipped;
    for (auto iv : intervals) {
        iv.lo = std::max(iv.lo, 0.0);
        iv.hi = std::min(iv.hi, length);
        if (iv.hi >= iv.lo) clipped.push_back(iv);
    }
    std::sort(clipped.begin(), clipped.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    for (const auto& iv : clipped) {
        if (!iv_.empty() && iv.lo <= iv_.back().hi) iv_.back().hi = std::max(iv_.back().hi, iv.hi);
        else iv_.push_back(iv);
    }
}

bool CausalRegion::contains(double x) const {
    return std::any_of(iv_.begin(), iv_.end(), [&](const Interval& iv) { return iv.contains(x); });
}

bool CausalRegion::subset_of(const CausalRegion& other) const {
    for (const auto& iv : iv_) {
        const bool covered = std::any_of(other.iv_.begin(), other.iv_.end(), [&](const Interval& o) {
            return o.lo <= iv.lo && iv.hi <= o.hi;
        });
        if (!covered) return false;
    }
    return true;
}

CausalRegion CausalRegion::padded(double pad) const {
    std::vector<Interval> out;
    for (const auto& iv : iv_) out.push_back({iv.lo - pad, iv.hi + pad});
    return CausalRegion(std::move(out), length_);
}

CausalRegion CausalRegion::united(const CausalRegion& other) const {
    auto all = iv_;
    all.insert(all.end(), other.iv_.begin(), other.iv_.end());
    return CausalRegion(std::move(all), std::max(length_, other.length_));
}

double CausalRegion::measure() const {
    double m = 0.0;
    for (const auto& iv : iv_) m += iv.length();
    return m;
}

namespace {

CausalRegion grow(const Geometry& g, const CausalRegion& seed, double s, bool radiate, double s_boundary) {
    std::vector<Interval> out;
    for (const auto& iv : seed.intervals()) out.push_back({iv.lo - s, iv.hi + s});
    if (radiate) {
        out.push_back({0.0, s_boundary});
        out.push_back({g.length - s_boundary, g.length});
    }
    return CausalRegion(std::move(out), g.length);
}

}  // namespace

CausalRegion causal_future(const Geometry& g, const CausalRegion& seed, double t0, double t,
                           bool include_boundary_radiation, double t_plus) {
    require(t >= t0, "causal_future: t >= t0 required");
    const double s = proper_time(g, t0, t);
    const bool radiate = include_boundary_radiation && t >= t_plus;
    const double sb = radiate ? proper_time(g, t_plus, t) : 0.0;
    return grow(g, seed, s, radiate, sb);
}

CausalRegion causal_past(const Geometry& g, const CausalRegion& seed, double t0, double t,
                         bool include_boundary_radiation, double t_minus) {
    require(t <= t0, "causal_past: t <= t0 required");
    const double s = proper_time(g, t, t0);
    const bool radiate = include_boundary_radiation && t <= t_minus;
    const double sb = radiate ? proper_time(g, t, t_minus) : 0.0;
    return grow(g, seed, s, radiate, sb);
}

double hit_time(const Geometry& g, const CausalRegion& seed, double t0, TimeDirection direction) {
    require(!seed.empty(), "hit_time: seed must be non-empty");
    const double lo = seed.intervals().front().lo;
    const double hi = seed.intervals().back().hi;
    const double d = std::min(lo, g.length - hi);
    return time_at_proper_distance(g, t0, std::max(d, 0.0), direction == TimeDirection::Future ? +1 : -1);
}

}  // namespace dirac
