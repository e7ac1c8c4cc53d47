#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dirac/boundary.hpp"
#include "dirac/discrete.hpp"
#include "dirac/geometry.hpp"
#include "dirac/oracle.hpp"

namespace dirac {

/// Axis-aligned space-time box [t0, t1] x [x0, x1] containing a source's support.
struct SpaceTimeBox {
    double t0 = 0.0, t1 = 0.0, x0 = 0.0, x1 = 0.0;
};

/// amplitude * bump_t(t) * bump((x - center) / half_width) in one mode.
struct SourceTerm {
    int mode = 0;
    TimeFunction envelope = TimeFunction::bump(0.5, 0.1);
    double center = 0.5;
    double half_width = 0.1;
    Vec2 amplitude = Vec2(1.0, 0.0);
};

/// Physical source f of D psi = f, per mode.
class Source {
public:
    using Callable = std::function<Field(double t, int mode, const Grid& grid)>;

    Source() = default;
    explicit Source(std::vector<SourceTerm> terms);
    /// Arbitrary source; `support` may be empty when no box is known.
    Source(Callable fn, std::vector<SpaceTimeBox> support);

    bool zero() const { return terms_.empty() && !fn_; }
    Field evaluate(double t, int mode, const Grid& grid) const;
    const std::vector<SpaceTimeBox>& support() const { return support_; }
    const std::vector<SourceTerm>& terms() const { return terms_; }
    /// True when some support box reaches x = 0 or x = length.
    bool touches_boundary(double length) const;

private:
    std::vector<SourceTerm> terms_;
    Callable fn_;
    std::vector<SpaceTimeBox> support_;
};

struct CauchyData {
    InitialData psi0;
    Source source;
    double t_init = 0.0;
    double t_begin = 0.0;  // window [t_begin, t_end] containing t_init
    double t_end = 1.0;
};

// Picture transforms. The evolution runs on psi~ = w(t) psi with
// w(t) = rho(t)^(1/2) N(t)^(n/2), rho the volume distortion of the conformal
// metric N^-2 g_t, so ||psi~||_H^2 equals the physical energy.
double volume_distortion(const Geometry& g, double t);
double state_weight(const Geometry& g, double t);
/// w_f(t) = rho^(1/2) N^((n+2)/2); f_check = -gamma(nu) w_f f.
double source_weight(const Geometry& g, double t);
/// (r(t)/r(0))^(n-1): physical slice volume per unit coordinate volume.
double slice_volume_factor(const Geometry& g, double t);

Field tilde_transform(const Geometry& g, const Field& psi, double t);
Field tilde_inverse(const Geometry& g, const Field& psi_tilde, double t);
Field source_check(const Geometry& g, const CliffordModel& model, const Field& f, double t);

struct StepDiagnostics {
    double t = 0.0;
    double energy = 0.0;             // sum over modes of ||psi~||_H^2
    double flux = 0.0;               // sum over modes of the SBP boundary rate
    double projection_defect = 0.0;  // re-projection onto V_B(t), H-norm
};

/// Time-indexed solution in the tilde picture. Snapshots are ascending in t.
struct Trajectory {
    Geometry geometry;
    CliffordModel model;
    Grid grid;
    std::vector<int> modes;
    std::vector<double> times;
    std::vector<std::vector<Field>> fields;  // [snapshot][mode index]
    std::vector<StepDiagnostics> diagnostics;  // ascending in t, one per step node
    double dt = 0.0;
    std::string scheme;
    double epsilon = 0.0;

    std::size_t size() const { return times.size(); }
    /// Snapshot index whose time is closest to t.
    std::size_t index_of(double t) const;
};

struct SolverOptions {
    double dt = 1e-3;
    /// Times the step sequence must hit exactly (snapshots are always kept there).
    std::vector<double> landing_times;
    /// Keep every n-th step as a snapshot (plus landings and endpoints).
    int snapshot_every = 1;
    /// Evolve even if the family makes the flux non-vanishing (negative controls).
    bool allow_non_admissible = false;
    bool parallel_modes = true;
};

/// Crank-Nicolson on V_B(t_mid):
///   (I + i dt/2 D_mid,B) psi_{n+1} = (I - i dt/2 D_mid,B) psi_n + dt Pi f_check(t_mid),
/// forward from t_init to t_end and backward to t_begin.
Trajectory solve_cauchy(const CauchyData& data, const Geometry& geometry, const CliffordModel& model,
                        const ProjectorFamily& family, const Grid& grid, const SolverOptions& options);

/// Classical RK4 for (d_t + i D_B J^(eps)) psi~ = f_check on V_B.
Trajectory solve_regularized(const CauchyData& data, const Geometry& geometry, const CliffordModel& model,
                             const ProjectorFamily& family, const Grid& grid, const SolverOptions& options,
                             double epsilon);

/// Largest |lambda| exp(-eps (1 + lambda^2)) over the spectrum of D_B.
double regularized_generator_norm(const SpectralCalculus& calc, double epsilon);

struct StabilityReport {
    double delta = 0.0;
    double max_ratio = 0.0;       // max_t ||psi~_pert(t) - psi~(t)||_H / delta
    double bound = 0.0;           // Gronwall bound for unit-norm perturbations
    double linearity_defect = 0.0;  // |ratio(delta) - ratio(delta/2)| / ratio(delta)
    bool pass = false;
};

/// Perturbs (f, psi0) by delta (g, phi) with fixed random unit-norm smooth g, phi.
StabilityReport solution_map_stability(const CauchyData& data, const Geometry& geometry, const CliffordModel& model,
                                       const ProjectorFamily& family, const Grid& grid, const SolverOptions& options,
                                       double delta, std::uint64_t seed = 11);

/// Boundary flux form restricted to the admissible traces: max over modes of
/// ||Z^* F Z|| with Z an orthonormal basis of ker(id - P(t)).
double trace_flux_defect(const Geometry& geometry, const CliffordModel& model, const ProjectorSample& p, double t);

}  // namespace dirac
