#pragma once

#include <vector>

#include "dirac/functions.hpp"

namespace dirac {

enum class GeometryKind { Strip, Cylinder };

/// Desk spacetime R x Sigma with Sigma = [0, length] (strip) or
/// [0, length] x S^1_{r(t)} (cylinder), metric -N(t)^2 dt^2 + dx^2 (+ r(t)^2 dtheta^2).
struct Geometry {
    GeometryKind kind = GeometryKind::Strip;
    double length = 1.0;
    TimeFunction lapse = TimeFunction::constant(1.0);
    TimeFunction radius = TimeFunction::constant(1.0);
    int mode_cutoff = 0;  // cylinder modes k in [-K, K]

    static Geometry strip(double length = 1.0);
    static Geometry cylinder(int mode_cutoff, TimeFunction radius, double length = 1.0);

    int spatial_dim() const { return kind == GeometryKind::Strip ? 1 : 2; }
    /// Mode indices carried by a field: {0} on the strip, -K..K on the cylinder.
    std::vector<int> modes() const;
    /// (k + 1/2) / r(t) on the cylinder, 0 on the strip.
    double mode_mass(int k, double t) const;
    /// Throws PreconditionViolation if N or r leave (0, inf) on [t0, t1].
    void validate(double t0, double t1) const;
};

/// Integral of the lapse over [t0, t1]; requires t0 <= t1.
double proper_time(const Geometry& g, double t0, double t1);

/// Time t1 >= t0 (direction +1) or t1 <= t0 (direction -1) at which the
/// proper-time distance from t0 equals `distance`.
double time_at_proper_distance(const Geometry& g, double t0, double distance, int direction);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
    bool contains(double x) const { return x >= lo && x <= hi; }
};

/// Union of closed x-intervals, kept sorted, disjoint and clipped to [0, length].
class CausalRegion {
public:
    CausalRegion() = default;
    CausalRegion(std::vector<Interval> intervals, double length);

    const std::vector<Interval>& intervals() const { return iv_; }
    bool empty() const { return iv_.empty(); }
    bool contains(double x) const;
    bool subset_of(const CausalRegion& other) const;
    /// Every interval enlarged by `pad` on both sides (then re-clipped).
    CausalRegion padded(double pad) const;
    CausalRegion united(const CausalRegion& other) const;
    double measure() const;
    double domain_length() const { return length_; }

private:
    std::vector<Interval> iv_;
    double length_ = 1.0;
};

enum class TimeDirection { Future, Past };

/// Causal future (t >= t0) of `seed` given at time t0, optionally enlarged by
/// the radiation from both boundary points once t passes t_plus.
CausalRegion causal_future(const Geometry& g, const CausalRegion& seed, double t0, double t,
                           bool include_boundary_radiation = false, double t_plus = 0.0);

/// Time-reflected counterpart of causal_future (t <= t0, t_minus <= t0).
CausalRegion causal_past(const Geometry& g, const CausalRegion& seed, double t0, double t,
                         bool include_boundary_radiation = false, double t_minus = 0.0);

/// First time the light cone of `seed` (given at t0) meets the boundary.
double hit_time(const Geometry& g, const CausalRegion& seed, double t0, TimeDirection direction);

}  // namespace dirac
