#include "dirac/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <memory>
#include <random>

#include <Eigen/SparseLU>

#include "dirac/analysis.hpp"
#include "dirac/errors.hpp"

namespace dirac {

namespace {
constexpr cplx I{0.0, 1.0};
}

Source::Source(std::vector<SourceTerm> terms) : terms_(std::move(terms)) {
    for (const auto& term : terms_) {
        require(term.half_width > 0.0, "source half width must be positive");
        const auto& p = term.envelope.params();
        SpaceTimeBox box{-1e300, 1e300, term.center - term.half_width, term.center + term.half_width};
        if (term.envelope.kind() == TimeFunction::Kind::Bump) box = {p[0] - p[1], p[0] + p[1], box.x0, box.x1};
        support_.push_back(box);
    }
}

Source::Source(Callable fn, std::vector<SpaceTimeBox> support) : fn_(std::move(fn)), support_(std::move(support)) {}

Field Source::evaluate(double t, int mode, const Grid& grid) const {
    Field f = Field::Zero(grid.dofs());
    for (const auto& term : terms_) {
        if (term.mode != mode) continue;
        const double e = term.envelope(t);
        if (e == 0.0) continue;
        for (int i = 0; i < grid.nx; ++i)
            f.segment<2>(2 * i) += e * smooth_bump((grid.x(i) - term.center) / term.half_width) * term.amplitude;
    }
    if (fn_) f += fn_(t, mode, grid);
    return f;
}

bool Source::touches_boundary(double length) const {
    return std::any_of(support_.begin(), support_.end(),
                       [&](const SpaceTimeBox& b) { return b.x0 <= 0.0 || b.x1 >= length; });
}

double volume_distortion(const Geometry& g, double t) {
    const int n = g.spatial_dim();
    double rho = std::pow(g.lapse(0.0) / g.lapse(t), n);
    if (g.kind == GeometryKind::Cylinder) rho *= g.radius(t) / g.radius(0.0);
    return rho;
}

double state_weight(const Geometry& g, double t) {
    return std::sqrt(volume_distortion(g, t)) * std::pow(g.lapse(t), 0.5 * g.spatial_dim());
}

double source_weight(const Geometry& g, double t) {
    return std::sqrt(volume_distortion(g, t)) * std::pow(g.lapse(t), 0.5 * (g.spatial_dim() + 2));
}

double slice_volume_factor(const Geometry& g, double t) {
    return g.kind == GeometryKind::Cylinder ? g.radius(t) / g.radius(0.0) : 1.0;
}

Field tilde_transform(const Geometry& g, const Field& psi, double t) { return state_weight(g, t) * psi; }
Field tilde_inverse(const Geometry& g, const Field& psi_tilde, double t) { return psi_tilde / state_weight(g, t); }

Field source_check(const Geometry& g, const CliffordModel& model, const Field& f, double t) {
    Field out(f.size());
    const Mat2 gamma = -source_weight(g, t) * model.gamma_t;
    for (Eigen::Index i = 0; i < f.size() / 2; ++i) out.segment<2>(2 * i) = gamma * f.segment<2>(2 * i);
    return out;
}

std::size_t Trajectory::index_of(double t) const {
    std::size_t best = 0;
    for (std::size_t n = 1; n < times.size(); ++n)
        if (std::abs(times[n] - t) < std::abs(times[best] - t)) best = n;
    return best;
}

double trace_flux_defect(const Geometry& geometry, const CliffordModel& model, const ProjectorSample& p, double t) {
    const Mat2 gstar = spatial_symbol(model, {1.0, 0.0}).adjoint();
    Mat4 f = Mat4::Zero();
    f.topLeftCorner<2, 2>() = -gstar;
    f.bottomRightCorner<2, 2>() = gstar;
    f *= I * geometry.lapse(t);
    double defect = 0.0;
    for (const auto& pm : p) {
        Eigen::JacobiSVD<Mat4> svd(Mat4::Identity() - pm, Eigen::ComputeFullV);
        const double smax = std::max(svd.singularValues()(0), 1e-300);
        std::vector<int> null_cols;
        for (int q = 0; q < 4; ++q)
            if (!(svd.singularValues()(q) > 1e-8 * smax && svd.singularValues()(q) > 1e-14)) null_cols.push_back(q);
        if (null_cols.empty()) continue;
        Eigen::MatrixXcd z(4, static_cast<Eigen::Index>(null_cols.size()));
        for (std::size_t j = 0; j < null_cols.size(); ++j) z.col(static_cast<Eigen::Index>(j)) = svd.matrixV().col(null_cols[j]);
        defect = std::max(defect, operator_norm(z.adjoint() * f * z));
    }
    return defect;
}

namespace {

bool is_time_dependent(const Geometry& g, const ProjectorFamily& family) {
    return family.time_dependent() || !g.lapse.is_constant() ||
           (g.kind == GeometryKind::Cylinder && !g.radius.is_constant());
}

// Step nodes from t_start toward t_stop, hitting each landing time exactly.
std::vector<double> step_nodes(double t_start, double t_stop, double dt, const std::vector<double>& landings) {
    std::vector<double> out{t_start};
    if (t_stop == t_start) return out;
    const double dir = t_stop > t_start ? 1.0 : -1.0;
    std::vector<double> stops;
    for (double l : landings)
        if ((l - t_start) * dir > 0.0 && (t_stop - l) * dir > 0.0) stops.push_back(l);
    std::sort(stops.begin(), stops.end(), [dir](double a, double b) { return a * dir < b * dir; });
    stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
    stops.push_back(t_stop);
    double a = t_start;
    for (double b : stops) {
        const long n = std::max(1L, static_cast<long>(std::ceil(std::abs(b - a) / dt - 1e-9)));
        for (long j = 1; j < n; ++j) out.push_back(a + (b - a) * static_cast<double>(j) / static_cast<double>(n));
        out.push_back(b);
        a = b;
    }
    return out;
}

std::vector<char> snapshot_mask(const std::vector<double>& nodes, const std::vector<double>& landings, int every) {
    std::vector<char> keep(nodes.size(), 0);
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        if (j == 0 || j + 1 == nodes.size() || (every > 0 && j % static_cast<std::size_t>(every) == 0)) keep[j] = 1;
        for (double l : landings)
            if (nodes[j] == l) keep[j] = 1;
    }
    return keep;
}

struct ModeRun {
    std::vector<Field> snapshots;
    std::vector<double> energy;
    std::vector<double> flux;
    std::vector<double> defect;
};

// Per-time operator pieces for one mode.
struct ModeFrame {
    std::unique_ptr<DiscreteOperator> op;
    std::unique_ptr<ConstraintSubspace> space;
    SparseMat generator;  // Pi D Pi
};

ModeFrame make_frame(const Geometry& g, const CliffordModel& model, const ProjectorFamily& family, const Grid& grid,
                     std::size_t mode_index, int mode, double t, bool allow_non_admissible) {
    const ProjectorSample p = family(t);
    if (!allow_non_admissible) {
        const double d = trace_flux_defect(g, model, p, t);
        if (d > 1e-8)
            throw SelfadjointnessViolation("boundary flux does not vanish on ran P (defect " + std::to_string(d) +
                                           ") at t = " + std::to_string(t));
    }
    ModeFrame f;
    f.op = std::make_unique<DiscreteOperator>(build_operator(g, model, grid, mode, t));
    f.space = std::make_unique<ConstraintSubspace>(*f.op, p[mode_index], 1);
    f.generator = projected_operator(*f.op, *f.space);
    return f;
}

Field source_term(const CauchyData& data, const Geometry& g, const CliffordModel& model, const Grid& grid, int mode,
                  double t) {
    if (data.source.zero()) return Field::Zero(grid.dofs());
    return source_check(g, model, data.source.evaluate(t, mode, grid), t);
}

class CrankNicolson {
public:
    CrankNicolson(const CauchyData& data, const Geometry& g, const CliffordModel& model, const ProjectorFamily& family,
                  const Grid& grid, std::size_t mode_index, int mode, bool allow)
        : data_(data), g_(g), model_(model), family_(family), grid_(grid), mode_index_(mode_index), mode_(mode),
          allow_(allow), td_(is_time_dependent(g, family)) {}

    // Advances psi from t to t_next; returns the re-projection defect.
    double step(Field& psi, double t, double t_next) {
        const double dt = t_next - t;
        const double tm = 0.5 * (t + t_next);
        const ModeFrame& mid = frame(tm);
        const bool refactor = td_ || !lu_ || std::abs(dt - last_dt_) > 1e-14 * std::abs(dt);
        if (refactor) {
            SparseMat id(grid_.dofs(), grid_.dofs());
            id.setIdentity();
            a_ = id + (I * (0.5 * dt)) * mid.generator;
            b_ = id - (I * (0.5 * dt)) * mid.generator;
            a_.makeCompressed();
            lu_ = std::make_unique<Eigen::SparseLU<SparseMat>>();
            lu_->compute(a_);
            if (lu_->info() != Eigen::Success) throw NonConvergedLinearSolve("sparse LU factorization failed");
            last_dt_ = dt;
        }
        if (td_) psi = mid.space->project(psi);
        Field rhs = b_ * psi;
        if (!data_.source.zero()) rhs += dt * mid.space->project(source_term(data_, g_, model_, grid_, mode_, tm));
        Field next = lu_->solve(rhs);
        const double res = (a_ * next - rhs).norm() / std::max(rhs.norm(), 1e-300);
        if (res > 1e-12 && rhs.norm() > 0.0)
            throw NonConvergedLinearSolve("Crank-Nicolson residual " + std::to_string(res) + " exceeds 1e-12");
        double defect = 0.0;
        if (td_) {
            const ModeFrame& end = frame(t_next);
            const Field projected = end.space->project(next);
            defect = h_norm(grid_, next - projected);
            next = projected;
        }
        psi = std::move(next);
        return defect;
    }

    double flux(const Field& psi, double t) { return frame(t).op->boundary_flux(psi); }
    const ModeFrame& frame(double t) {
        if (!td_) {
            if (!fixed_.op) fixed_ = make_frame(g_, model_, family_, grid_, mode_index_, mode_, data_.t_init, allow_);
            return fixed_;
        }
        auto it = cache_.find(t);
        if (it == cache_.end()) {
            if (cache_.size() > 4) cache_.clear();
            it = cache_.emplace(t, make_frame(g_, model_, family_, grid_, mode_index_, mode_, t, allow_)).first;
        }
        return it->second;
    }

private:
    const CauchyData& data_;
    const Geometry& g_;
    const CliffordModel& model_;
    const ProjectorFamily& family_;
    const Grid& grid_;
    std::size_t mode_index_;
    int mode_;
    bool allow_;
    bool td_;
    ModeFrame fixed_;
    std::map<double, ModeFrame> cache_;
    SparseMat a_, b_;
    std::unique_ptr<Eigen::SparseLU<SparseMat>> lu_;
    double last_dt_ = 0.0;
};

class RungeKutta {
public:
    RungeKutta(const CauchyData& data, const Geometry& g, const CliffordModel& model, const ProjectorFamily& family,
               const Grid& grid, std::size_t mode_index, int mode, double epsilon)
        : data_(data), g_(g), model_(model), family_(family), grid_(grid), mode_index_(mode_index), mode_(mode),
          epsilon_(epsilon), td_(is_time_dependent(g, family)) {}

    struct Frame {
        std::unique_ptr<DiscreteOperator> op;
        std::unique_ptr<ConstraintSubspace> space;
        std::unique_ptr<SpectralCalculus> calc;
    };

    Frame& frame(double t) {
        const double key = td_ ? t : data_.t_init;
        auto it = cache_.find(key);
        if (it == cache_.end()) {
            if (cache_.size() > 6) cache_.clear();
            Frame f;
            const ProjectorSample p = family_(key);
            f.op = std::make_unique<DiscreteOperator>(build_operator(g_, model_, grid_, mode_, key));
            f.space = std::make_unique<ConstraintSubspace>(*f.op, p[mode_index_], 1);
            f.calc = std::make_unique<SpectralCalculus>(*f.op, *f.space);
            it = cache_.emplace(key, std::move(f)).first;
        }
        return it->second;
    }

    Field rhs(double t, const Field& psi) {
        Frame& f = frame(t);
        const double eps = epsilon_;
        Field out = (-I) * f.calc->apply([eps](double lam) { return lam * mollifier_symbol(eps, lam); }, psi);
        if (!data_.source.zero()) out += f.space->project(source_term(data_, g_, model_, grid_, mode_, t));
        return out;
    }

    double step(Field& psi, double t, double t_next) {
        const double dt = t_next - t;
        const double gnorm = regularized_generator_norm(*frame(t).calc, epsilon_);
        if (std::abs(dt) * gnorm > 2.8)
            throw StepSizeTooLarge("RK4 stability bound violated: |dt| * ||G|| = " +
                                   std::to_string(std::abs(dt) * gnorm));
        const Field k1 = rhs(t, psi);
        const Field k2 = rhs(t + 0.5 * dt, psi + 0.5 * dt * k1);
        const Field k3 = rhs(t + 0.5 * dt, psi + 0.5 * dt * k2);
        const Field k4 = rhs(t_next, psi + dt * k3);
        Field next = psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        double defect = 0.0;
        if (td_) {
            const Field projected = frame(t_next).space->project(next);
            defect = h_norm(grid_, next - projected);
            next = projected;
        }
        psi = std::move(next);
        return defect;
    }

    double flux(const Field& psi, double t) { return frame(t).op->boundary_flux(psi); }

private:
    const CauchyData& data_;
    const Geometry& g_;
    const CliffordModel& model_;
    const ProjectorFamily& family_;
    const Grid& grid_;
    std::size_t mode_index_;
    int mode_;
    double epsilon_;
    bool td_;
    std::map<double, Frame> cache_;
};

template <class Stepper>
ModeRun run_direction(Stepper& stepper, const Field& psi_init, const std::vector<double>& nodes,
                      const std::vector<char>& keep, const Grid& grid) {
    ModeRun r;
    Field psi = psi_init;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        double defect = 0.0;
        if (j > 0) defect = stepper.step(psi, nodes[j - 1], nodes[j]);
        r.energy.push_back(kernels::weighted_norm_sq_serial(grid.nx, grid.h, {psi.data(), static_cast<std::size_t>(psi.size())}));
        r.flux.push_back(stepper.flux(psi, nodes[j]));
        r.defect.push_back(defect);
        if (keep[j]) r.snapshots.push_back(psi);
    }
    return r;
}

enum class Scheme { CrankNicolson, Mollified };

Trajectory solve_impl(const CauchyData& data, const Geometry& geometry, const CliffordModel& model,
                      const ProjectorFamily& family, const Grid& grid, const SolverOptions& options, Scheme scheme,
                      double epsilon) {
    require(options.dt > 0.0, "dt must be positive");
    require(data.t_begin <= data.t_init && data.t_init <= data.t_end, "t_init must lie inside the window");
    require(std::abs(grid.length - geometry.length) < 1e-12, "grid length must match the geometry");
    geometry.validate(data.t_begin, data.t_end);
    for (const auto& b : data.psi0.bumps) b.validate(geometry.length);

    const auto modes = geometry.modes();
    const auto fwd = step_nodes(data.t_init, data.t_end, options.dt, options.landing_times);
    const auto bwd = step_nodes(data.t_init, data.t_begin, options.dt, options.landing_times);
    const auto keep_f = snapshot_mask(fwd, options.landing_times, options.snapshot_every);
    const auto keep_b = snapshot_mask(bwd, options.landing_times, options.snapshot_every);

    std::vector<ModeRun> forward(modes.size()), backward(modes.size());
    std::vector<std::exception_ptr> errors(modes.size());
    const long nm = static_cast<long>(modes.size());

    auto run_mode = [&](long m) {
        try {
            const std::size_t mi = static_cast<std::size_t>(m);
            Field psi0 = tilde_transform(geometry, data.psi0.sample(grid, modes[mi]), data.t_init);
            if (scheme == Scheme::CrankNicolson) {
                CrankNicolson f(data, geometry, model, family, grid, mi, modes[mi], options.allow_non_admissible);
                psi0 = f.frame(data.t_init).space->project(psi0);
                forward[mi] = run_direction(f, psi0, fwd, keep_f, grid);
                CrankNicolson b(data, geometry, model, family, grid, mi, modes[mi], options.allow_non_admissible);
                backward[mi] = run_direction(b, psi0, bwd, keep_b, grid);
            } else {
                RungeKutta f(data, geometry, model, family, grid, mi, modes[mi], epsilon);
                psi0 = f.frame(data.t_init).space->project(psi0);
                forward[mi] = run_direction(f, psi0, fwd, keep_f, grid);
                RungeKutta b(data, geometry, model, family, grid, mi, modes[mi], epsilon);
                backward[mi] = run_direction(b, psi0, bwd, keep_b, grid);
            }
        } catch (...) {
            errors[static_cast<std::size_t>(m)] = std::current_exception();
        }
    };

    if (options.parallel_modes) {
#pragma omp parallel for schedule(dynamic)
        for (long m = 0; m < nm; ++m) run_mode(m);
    } else {
        for (long m = 0; m < nm; ++m) run_mode(m);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    Trajectory traj;
    traj.geometry = geometry;
    traj.model = model;
    traj.grid = grid;
    traj.modes = modes;
    traj.dt = options.dt;
    traj.scheme = scheme == Scheme::CrankNicolson ? "crank-nicolson" : "rk4-mollified";
    traj.epsilon = epsilon;

    // assemble ascending in t: backward nodes reversed (skipping t_init), then forward
    std::vector<std::size_t> bsnap;
    for (std::size_t j = 0; j < bwd.size(); ++j)
        if (keep_b[j]) bsnap.push_back(j);
    for (std::size_t s = bsnap.size(); s-- > 1;) {
        traj.times.push_back(bwd[bsnap[s]]);
        std::vector<Field> f;
        for (std::size_t m = 0; m < modes.size(); ++m) f.push_back(backward[m].snapshots[s]);
        traj.fields.push_back(std::move(f));
    }
    std::size_t snap = 0;
    for (std::size_t j = 0; j < fwd.size(); ++j) {
        if (!keep_f[j]) continue;
        traj.times.push_back(fwd[j]);
        std::vector<Field> f;
        for (std::size_t m = 0; m < modes.size(); ++m) f.push_back(forward[m].snapshots[snap]);
        traj.fields.push_back(std::move(f));
        ++snap;
    }
    auto diag = [&](const std::vector<ModeRun>& runs, std::size_t j, double t) {
        StepDiagnostics d;
        d.t = t;
        for (const auto& r : runs) {
            d.energy += r.energy[j];
            d.flux += r.flux[j];
            d.projection_defect = std::max(d.projection_defect, r.defect[j]);
        }
        return d;
    };
    for (std::size_t j = bwd.size(); j-- > 1;) traj.diagnostics.push_back(diag(backward, j, bwd[j]));
    for (std::size_t j = 0; j < fwd.size(); ++j) traj.diagnostics.push_back(diag(forward, j, fwd[j]));
    return traj;
}

}  // namespace

Trajectory solve_cauchy(const CauchyData& data, const Geometry& geometry, const CliffordModel& model,
                        const ProjectorFamily& family, const Grid& grid, const SolverOptions& options) {
    return solve_impl(data, geometry, model, family, grid, options, Scheme::CrankNicolson, 0.0);
}

Trajectory solve_regularized(const CauchyData& data, const Geometry& geometry, const CliffordModel& model,
                             const ProjectorFamily& family, const Grid& grid, const SolverOptions& options,
                             double epsilon) {
    require(epsilon > 0.0, "regularized problem needs epsilon > 0");
    return solve_impl(data, geometry, model, family, grid, options, Scheme::Mollified, epsilon);
}

double regularized_generator_norm(const SpectralCalculus& calc, double epsilon) {
    double m = 0.0;
    for (Eigen::Index j = 0; j < calc.eigenvalues().size(); ++j) {
        const double lam = calc.eigenvalues()(j);
        m = std::max(m, std::abs(lam) * mollifier_symbol(epsilon, lam));
    }
    return m;
}


StabilityReport solution_map_stability(const CauchyData& data, const Geometry& geometry, const CliffordModel& model,
                                       const ProjectorFamily& family, const Grid& grid, const SolverOptions& options,
                                       double delta, std::uint64_t seed) {
    require(delta > 0.0, "perturbation scale must be positive");
    std::mt19937_64 rng(seed);
    const double len = geometry.length;
    std::uniform_real_distribution<double> uc(0.35 * len, 0.65 * len), uw(0.08 * len, 0.15 * len), ua(-1.0, 1.0);
    const auto modes = geometry.modes();

    InitialData phi;
    for (int k : modes) phi.bumps.push_back({uc(rng), uw(rng), Vec2(cplx(ua(rng), ua(rng)), cplx(ua(rng), ua(rng))), k});
    double phi_norm_sq = 0.0;
    for (int k : modes) phi_norm_sq += std::pow(h_norm(grid, phi.sample(grid, k)), 2);
    phi_norm_sq *= slice_volume_factor(geometry, data.t_init);
    for (auto& b : phi.bumps) b.amplitude /= std::sqrt(phi_norm_sq);

    const double tc = data.t_init + 0.25 * (data.t_end - data.t_init);
    const double tw = 0.1 * (data.t_end - data.t_begin);
    std::vector<SourceTerm> g_terms;
    for (int k : modes)
        g_terms.push_back({k, TimeFunction::bump(tc, tw), uc(rng), uw(rng),
                           Vec2(cplx(ua(rng), ua(rng)), cplx(ua(rng), ua(rng)))});
    const double g_norm_sq = spacetime_norm_sq(Source(g_terms), geometry, grid, data.t_begin, data.t_end);
    for (auto& term : g_terms) term.amplitude /= std::sqrt(g_norm_sq);

    auto perturbed = [&](double d) {
        CauchyData p = data;
        for (auto b : phi.bumps) {
            b.amplitude *= d;
            p.psi0.bumps.push_back(b);
        }
        std::vector<SourceTerm> terms = data.source.terms();
        for (auto term : g_terms) {
            term.amplitude *= d;
            terms.push_back(term);
        }
        p.source = Source(terms);
        return p;
    };
    require(data.source.terms().size() == data.source.support().size(),
            "stability report needs a source built from analytic terms");

    const Trajectory base = solve_cauchy(data, geometry, model, family, grid, options);
    auto max_ratio = [&](double d) {
        const Trajectory pert = solve_cauchy(perturbed(d), geometry, model, family, grid, options);
        double r = 0.0;
        for (std::size_t n = 0; n < base.size(); ++n) {
            double s = 0.0;
            for (std::size_t m = 0; m < modes.size(); ++m)
                s += std::pow(h_norm(grid, pert.fields[n][m] - base.fields[n][m]), 2);
            r = std::max(r, std::sqrt(s) / d);
        }
        return r;
    };
    StabilityReport rep;
    rep.delta = delta;
    rep.max_ratio = max_ratio(delta);
    const double half = max_ratio(0.5 * delta);
    rep.linearity_defect = std::abs(rep.max_ratio - half) / std::max(rep.max_ratio, 1e-300);
    const double c = estimate_constant(geometry, data.t_begin, data.t_end);
    rep.bound = std::sqrt(std::exp(c * (data.t_end - data.t_begin)) * (c + 1.0) *
                          std::pow(geometry.lapse(data.t_init), geometry.spatial_dim()));
    rep.pass = rep.max_ratio <= rep.bound && rep.linearity_defect <= 1e-10;
    return rep;
}

}  // namespace dirac
