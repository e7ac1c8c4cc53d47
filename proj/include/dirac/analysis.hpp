#pragma once

#include <string>
#include <vector>

#include "dirac/evolve.hpp"

namespace dirac {

/// Physical energy of snapshot n: sum over modes of ||psi~||_H^2 / N(0)^n.
double energy(const Trajectory& traj, std::size_t n);
/// Sum over modes of the SBP boundary rate i b(psi~, psi~) at snapshot n.
double boundary_flux(const Trajectory& traj, std::size_t n);

/// C = 1 + max N over [t0, t1].
double estimate_constant(const Geometry& g, double t0, double t1);

/// int_{t0}^{t1} int |f|^2 dvol for an analytic source (Gauss-Kronrod in t, SBP quadrature in x).
double spacetime_norm_sq(const Source& f, const Geometry& g, const Grid& grid, double t0, double t1);

struct EnergyEstimateReport {
    double constant = 0.0;
    double t0 = 0.0;
    double t1 = 0.0;
    bool reversed = false;
    double left = 0.0;
    double right = 0.0;
    double source_term = 0.0;   // int int |D psi|_0^2
    double initial_term = 0.0;  // energy on the starting slice
    double slack = 0.0;         // right / left (inf when left = 0)
    bool pass = false;
};

/// Energy estimate between the snapshots at t0 < t1. With `reversed` the
/// roles of the slices swap: energy at t0 is bounded through data at t1.
EnergyEstimateReport check_energy_estimate(const Trajectory& traj, const Source& f, double t0, double t1,
                                           bool reversed = false);

struct SupportSnapshot {
    double t = 0.0;
    CausalRegion measured;  // nodes with density > theta * max, as cells of width h
    CausalRegion allowed;   // already padded
    double violation = 0.0;  // energy outside `allowed` / total energy
};

struct SupportReport {
    double threshold = 1e-8;
    double padding = 0.0;
    bool boundary_radiation = false;
    std::vector<SupportSnapshot> snapshots;
    double max_violation = 0.0;
    bool pass = false;
};

/// Compares every snapshot with J(supp psi0 ∪ supp f) enlarged, for nonlocal
/// families, by the boundary radiation after the first boundary hit.
SupportReport check_support(const Trajectory& traj, const CauchyData& data, bool local_family,
                            double threshold = 1e-8);

/// Allowed region at time t (unpadded).
CausalRegion allowed_region(const Geometry& g, const CauchyData& data, double t, bool local_family);

/// Share of the snapshot energy carried by nodes with x in [a, b].
double energy_fraction(const Trajectory& traj, std::size_t n, double a, double b);
/// Same for a single field on a grid (all weight on one mode).
double energy_fraction(const Grid& grid, const std::vector<Field>& fields, double a, double b);

}  // namespace dirac
