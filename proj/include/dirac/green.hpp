#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dirac/analysis.hpp"
#include "dirac/evolve.hpp"

namespace dirac {

struct GreenOptions {
    double dt = 1e-3;
    double t_begin = 0.0;  // window
    double t_end = 1.0;
    /// Auxiliary slice with zero data; defaults to the last grid time before
    /// (after) the source support. Snapped to a multiple of dt.
    std::optional<double> slice;
    bool parallel_modes = true;
};

struct GreenResult {
    std::string direction;  // "retarded" (G+) or "advanced" (G-)
    double slice = 0.0;
    Trajectory trajectory;
    double residual = 0.0;          // ||D G f - f|| / ||f|| over interior time nodes
    double quiet_norm = 0.0;        // max ||G f(t)|| before (after) supp f
    SupportReport support;
};

/// Retarded Green operator: zero data on a slice before supp f, evolve forward.
GreenResult green_plus(const Source& f, const Geometry& geometry, const CliffordModel& model,
                       const ProjectorFamily& family, const Grid& grid, const GreenOptions& options);
/// Advanced Green operator: zero data on a slice after supp f, evolve backward.
GreenResult green_minus(const Source& f, const Geometry& geometry, const CliffordModel& model,
                        const ProjectorFamily& family, const Grid& grid, const GreenOptions& options);

struct ResidualReport {
    double relative = 0.0;  // ||r||_{L2(M)} / ||f||_{L2(M)}
    double residual_norm = 0.0;
    double source_norm = 0.0;
    int nodes = 0;
};

/// Residual of D psi - f evaluated from a trajectory kept at every step:
/// central differences in t at interior nodes, the scheme's projected SBP
/// operator in x. Endpoint nodes are excluded.
ResidualReport dirac_residual(const Trajectory& traj, const Source& f, const ProjectorFamily& family);

/// Max H-norm difference between two trajectories over their common times.
double trajectory_difference(const Trajectory& a, const Trajectory& b);

struct GreenTrial {
    double residual_plus = 0.0;
    double residual_minus = 0.0;
    double round_trip_plus = 0.0;
    double round_trip_minus = 0.0;
    double quiet_plus = 0.0;
    double quiet_minus = 0.0;
    double support_violation = 0.0;
};

struct GreenAxiomReport {
    std::vector<GreenTrial> trials;
    double max_residual = 0.0;
    double max_round_trip = 0.0;
    double max_quiet = 0.0;
    double max_support_violation = 0.0;
    double slice_independence = 0.0;
    double linearity = 0.0;
    double tolerance = 1e-2;
    bool pass = false;
};

/// Random smooth compact sources: D G f = f and G D psi = psi (psi a
/// temporally cut-off solution), support, slice independence and linearity.
GreenAxiomReport check_green_axioms(const Geometry& geometry, const CliffordModel& model,
                                    const ProjectorFamily& family, const Grid& grid, double dt, int trials,
                                    std::uint64_t seed = 3);

/// ||G- f - R G+ (-R f)|| with R(t, x) = (-t, length - x); defined for the
/// strip with a time-symmetric family and bump-enveloped sources.
double time_reflection_defect(const Source& f, const Geometry& geometry, const CliffordModel& model,
                              const ProjectorFamily& family, const Grid& grid, double dt, double window);

}  // namespace dirac
