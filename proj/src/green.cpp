#include "dirac/green.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>

#include "dirac/errors.hpp"

namespace dirac {

namespace {

constexpr cplx I{0.0, 1.0};

double snap(double t, double dt) { return dt * std::round(t / dt); }

std::pair<double, double> temporal_support(const Source& f) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& b : f.support()) {
        lo = std::min(lo, b.t0);
        hi = std::max(hi, b.t1);
    }
    if (f.support().empty() || lo < -1e200 || hi > 1e200)
        throw PreconditionViolation("Green operators need a source with compact temporal support");
    return {lo, hi};
}

void check_source(const Source& f, const Geometry& g) {
    if (f.touches_boundary(g.length)) throw SourceTouchesBoundary("source support meets the boundary");
}

double snapshot_norm(const Trajectory& traj, std::size_t n) {
    double s = 0.0;
    for (const auto& f : traj.fields[n]) s += std::pow(h_norm(traj.grid, f), 2);
    return std::sqrt(s);
}

bool static_problem(const Geometry& g, const ProjectorFamily& family) {
    return !family.time_dependent() && g.lapse.is_constant() &&
           (g.kind == GeometryKind::Strip || g.radius.is_constant());
}

GreenResult run_green(const Source& f, const Geometry& geometry, const CliffordModel& model,
                      const ProjectorFamily& family, const Grid& grid, const GreenOptions& options, bool retarded) {
    require(options.dt > 0.0, "dt must be positive");
    check_source(f, geometry);
    GreenResult r;
    r.direction = retarded ? "retarded" : "advanced";
    CauchyData data;
    data.source = f;
    const double begin = snap(options.t_begin, options.dt);
    const double end = snap(options.t_end, options.dt);
    double lo = begin, hi = end;
    if (!f.zero()) std::tie(lo, hi) = temporal_support(f);
    if (retarded) {
        r.slice = options.slice ? snap(*options.slice, options.dt) : options.dt * std::floor(lo / options.dt + 1e-9);
        if (f.zero() && !options.slice) r.slice = begin;
        require(r.slice <= lo + 1e-12, "auxiliary slice must precede the source support");
        require(r.slice >= begin - 1e-12 && r.slice < end, "auxiliary slice must lie in the window");
        data.t_init = data.t_begin = r.slice;
        data.t_end = end;
    } else {
        r.slice = options.slice ? snap(*options.slice, options.dt) : options.dt * std::ceil(hi / options.dt - 1e-9);
        if (f.zero() && !options.slice) r.slice = end;
        require(r.slice >= hi - 1e-12, "auxiliary slice must follow the source support");
        require(r.slice <= end + 1e-12 && r.slice > begin, "auxiliary slice must lie in the window");
        data.t_init = data.t_end = r.slice;
        data.t_begin = begin;
    }
    SolverOptions so;
    so.dt = options.dt;
    so.snapshot_every = 1;
    so.parallel_modes = options.parallel_modes;
    r.trajectory = solve_cauchy(data, geometry, model, family, grid, so);
    r.residual = f.zero() ? 0.0 : dirac_residual(r.trajectory, f, family).relative;
    for (std::size_t n = 0; n < r.trajectory.size(); ++n) {
        const double t = r.trajectory.times[n];
        if ((retarded && t < lo) || (!retarded && t > hi))
            r.quiet_norm = std::max(r.quiet_norm, snapshot_norm(r.trajectory, n));
    }
    r.support = check_support(r.trajectory, data, family.local());
    return r;
}

}  // namespace

GreenResult green_plus(const Source& f, const Geometry& geometry, const CliffordModel& model,
                       const ProjectorFamily& family, const Grid& grid, const GreenOptions& options) {
    return run_green(f, geometry, model, family, grid, options, true);
}

GreenResult green_minus(const Source& f, const Geometry& geometry, const CliffordModel& model,
                        const ProjectorFamily& family, const Grid& grid, const GreenOptions& options) {
    return run_green(f, geometry, model, family, grid, options, false);
}

ResidualReport dirac_residual(const Trajectory& traj, const Source& f, const ProjectorFamily& family) {
    require(traj.size() >= 3, "residual needs at least three time nodes");
    const Geometry& g = traj.geometry;
    const Grid& grid = traj.grid;
    const bool td = !static_problem(g, family);
    std::vector<std::unique_ptr<DiscreteOperator>> ops(traj.modes.size());
    std::vector<std::unique_ptr<ConstraintSubspace>> spaces(traj.modes.size());
    auto prepare = [&](double t) {
        const ProjectorSample p = family(t);
        for (std::size_t m = 0; m < traj.modes.size(); ++m) {
            ops[m] = std::make_unique<DiscreteOperator>(build_operator(g, traj.model, grid, traj.modes[m], t));
            spaces[m] = std::make_unique<ConstraintSubspace>(*ops[m], p[m], 1);
        }
    };
    if (!td) prepare(traj.times.front());

    ResidualReport rep;
    double res_sq = 0.0, src_sq = 0.0;
    for (std::size_t n = 1; n + 1 < traj.size(); ++n) {
        const double t = traj.times[n];
        const double span = traj.times[n + 1] - traj.times[n - 1];
        if (td) prepare(t);
        const double dt = 0.5 * std::abs(span);
        const double vol = g.lapse(t) * slice_volume_factor(g, t);
        const double wf = source_weight(g, t);
        for (std::size_t m = 0; m < traj.modes.size(); ++m) {
            const Field fm = f.evaluate(t, traj.modes[m], grid);
            Field r = (traj.fields[n + 1][m] - traj.fields[n - 1][m]) / span;
            r += I * spaces[m]->project(ops[m]->apply(traj.fields[n][m]));
            r -= spaces[m]->project(source_check(g, traj.model, fm, t));
            res_sq += dt * vol / (wf * wf) * std::pow(h_norm(grid, r), 2);
            src_sq += dt * vol * std::pow(h_norm(grid, fm), 2);
        }
        ++rep.nodes;
    }
    rep.residual_norm = std::sqrt(res_sq);
    rep.source_norm = std::sqrt(src_sq);
    rep.relative = rep.source_norm > 0.0 ? rep.residual_norm / rep.source_norm : rep.residual_norm;
    return rep;
}

double trajectory_difference(const Trajectory& a, const Trajectory& b) {
    double d = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) {
        const std::size_t j = b.index_of(a.times[n]);
        if (b.size() == 0 || std::abs(b.times[j] - a.times[n]) > 1e-9) continue;
        double s = 0.0;
        for (std::size_t m = 0; m < a.modes.size(); ++m) s += std::pow(h_norm(a.grid, a.fields[n][m] - b.fields[j][m]), 2);
        d = std::max(d, std::sqrt(s));
    }
    return d;
}

namespace {

struct CutoffSolution {
    std::vector<std::unique_ptr<SpectralCalculus>> calc;
    std::vector<Field> psi0;  // tilde picture, projected
    double w_state = 1.0;

    // switched on over [0, 0.1], off over [0.15, 0.25]
    double chi(double t) const { return smooth_step(t, 0.0, 0.1) * (1.0 - smooth_step(t, 0.15, 0.25)); }
    double chi_prime(double t) const {
        return smooth_step_derivative(t, 0.0, 0.1) * (1.0 - smooth_step(t, 0.15, 0.25)) -
               smooth_step(t, 0.0, 0.1) * smooth_step_derivative(t, 0.15, 0.25);
    }
    Field value(std::size_t m, double t) const { return chi(t) * dense_oracle(*calc[m], psi0[m], t); }
};

// Relative space-time L2 error between a trajectory and chi psi_sol.
double round_trip_error(const Trajectory& traj, const CutoffSolution& sol) {
    double err = 0.0, ref = 0.0;
    for (std::size_t n = 0; n < traj.size(); ++n)
        for (std::size_t m = 0; m < traj.modes.size(); ++m) {
            const Field exact = sol.value(m, traj.times[n]);
            err += std::pow(h_norm(traj.grid, traj.fields[n][m] - exact), 2);
            ref += std::pow(h_norm(traj.grid, exact), 2);
        }
    return ref > 0.0 ? std::sqrt(err / ref) : std::sqrt(err);
}

}  // namespace

GreenAxiomReport check_green_axioms(const Geometry& geometry, const CliffordModel& model,
                                    const ProjectorFamily& family, const Grid& grid, double dt, int trials,
                                    std::uint64_t seed) {
    require(trials >= 1, "at least one Green trial is required");
    std::mt19937_64 rng(seed);
    const double len = geometry.length;
    std::uniform_real_distribution<double> uc(0.35, 0.65), uw(0.08, 0.15), ut(0.15, 0.25), uwt(0.05, 0.1),
        ua(-1.0, 1.0);
    const auto modes = geometry.modes();
    GreenOptions opt;
    opt.dt = dt;
    opt.t_begin = 0.0;
    opt.t_end = 1.0;

    auto random_source = [&]() {
        std::vector<SourceTerm> terms;
        for (int k : modes)
            terms.push_back({k, TimeFunction::bump(ut(rng), uwt(rng)), uc(rng) * len, uw(rng) * len,
                             Vec2(cplx(ua(rng), ua(rng)), cplx(ua(rng), ua(rng)))});
        return Source(terms);
    };

    GreenAxiomReport rep;
    const bool round_trip = static_problem(geometry, family);
    for (int trial = 0; trial < trials; ++trial) {
        GreenTrial gt;
        const Source f = random_source();
        const GreenResult gp = green_plus(f, geometry, model, family, grid, opt);
        const GreenResult gm = green_minus(f, geometry, model, family, grid, opt);
        gt.residual_plus = gp.residual;
        gt.residual_minus = gm.residual;
        gt.quiet_plus = gp.quiet_norm;
        gt.quiet_minus = gm.quiet_norm;
        gt.support_violation = std::max(gp.support.max_violation, gm.support.max_violation);

        gt.round_trip_plus = gt.round_trip_minus = std::numeric_limits<double>::quiet_NaN();
        if (round_trip) {
            auto sol = std::make_shared<CutoffSolution>();
            std::uniform_real_distribution<double> rc(0.48, 0.52), rw(0.12, 0.16);
            const double c = rc(rng) * len, w = rw(rng) * len;
            sol->w_state = state_weight(geometry, 0.0);
            for (std::size_t m = 0; m < modes.size(); ++m) {
                const auto op = build_operator(geometry, model, grid, modes[m], 0.0);
                const ConstraintSubspace v(op, family(0.0)[m], 1);
                sol->calc.push_back(std::make_unique<SpectralCalculus>(op, v));
                InitialData d{{{c, w, Vec2(cplx(ua(rng), ua(rng)), cplx(ua(rng), ua(rng))), modes[m]}}};
                sol->psi0.push_back(v.project(sol->w_state * d.sample(grid, modes[m])));
            }
            // x-extent of psi_sol on the cutoff windows, ignoring dispersive tails below 1e-8
            double xlo = len, xhi = 0.0;
            for (double t0 : {0.0, 0.15})
                for (int j = 0; j <= 20; ++j) {
                    const double t = t0 + 0.1 * j / 20.0;
                    for (std::size_t m = 0; m < modes.size(); ++m) {
                        const Field v = dense_oracle(*sol->calc[m], sol->psi0[m], t);
                        const double peak = v.cwiseAbs().maxCoeff();
                        for (int i = 0; i < grid.nx; ++i)
                            if (v.segment<2>(2 * i).norm() > 1e-8 * peak) {
                                xlo = std::min(xlo, grid.x(i) - grid.h);
                                xhi = std::max(xhi, grid.x(i) + grid.h);
                            }
                    }
                }
            if (xlo > 0.0 && xhi < len) {
                const Mat2 gamma_inv = model.gamma_t.inverse();
                const Geometry geo = geometry;
                Source df(
                    [sol, gamma_inv, geo](double t, int mode, const Grid& gr) -> Field {
                        const double cp = sol->chi_prime(t);
                        const std::size_t m = static_cast<std::size_t>(mode + geo.mode_cutoff);
                        if (cp == 0.0) return Field::Zero(gr.dofs());
                        const Field fc = cp * dense_oracle(*sol->calc[m], sol->psi0[m], t);
                        Field out(fc.size());
                        const double wf = source_weight(geo, t);
                        for (Eigen::Index i = 0; i < fc.size() / 2; ++i)
                            out.segment<2>(2 * i) = -gamma_inv * fc.segment<2>(2 * i) / wf;
                        return out;
                    },
                    {{0.0, 0.1, xlo, xhi}, {0.15, 0.25, xlo, xhi}});
                gt.round_trip_plus = round_trip_error(green_plus(df, geometry, model, family, grid, opt).trajectory, *sol);
                gt.round_trip_minus =
                    round_trip_error(green_minus(df, geometry, model, family, grid, opt).trajectory, *sol);
            }
        }
        rep.max_residual = std::max({rep.max_residual, gt.residual_plus, gt.residual_minus});
        if (!std::isnan(gt.round_trip_plus))
            rep.max_round_trip = std::max({rep.max_round_trip, gt.round_trip_plus, gt.round_trip_minus});
        rep.max_quiet = std::max({rep.max_quiet, gt.quiet_plus, gt.quiet_minus});
        rep.max_support_violation = std::max(rep.max_support_violation, gt.support_violation);
        rep.trials.push_back(gt);
    }

    // slice independence and linearity on a source starting after t = 0.05
    {
        const Source f1 = random_source(), f2 = random_source();
        GreenOptions a = opt, b = opt;
        a.slice = 0.0;
        b.slice = 0.05;
        const Trajectory ta = green_plus(f1, geometry, model, family, grid, a).trajectory;
        const Trajectory tb = green_plus(f1, geometry, model, family, grid, b).trajectory;
        rep.slice_independence = trajectory_difference(ta, tb);

        std::vector<SourceTerm> both = f1.terms();
        both.insert(both.end(), f2.terms().begin(), f2.terms().end());
        const Trajectory t12 = green_plus(Source(both), geometry, model, family, grid, a).trajectory;
        const Trajectory t2 = green_plus(f2, geometry, model, family, grid, a).trajectory;
        double d = 0.0, scale = 0.0;
        for (std::size_t n = 0; n < t12.size(); ++n) {
            double s = 0.0;
            for (std::size_t m = 0; m < modes.size(); ++m)
                s += std::pow(h_norm(grid, t12.fields[n][m] - ta.fields[n][m] - t2.fields[n][m]), 2);
            d = std::max(d, std::sqrt(s));
            scale = std::max(scale, snapshot_norm(t12, n));
        }
        rep.linearity = scale > 0.0 ? d / scale : d;
    }
    rep.pass = rep.max_residual <= rep.tolerance && rep.max_round_trip <= rep.tolerance && rep.max_quiet <= 1e-10 &&
               rep.max_support_violation <= 1e-8 && rep.slice_independence <= 1e-10 && rep.linearity <= 1e-12;
    return rep;
}

double time_reflection_defect(const Source& f, const Geometry& geometry, const CliffordModel& model,
                              const ProjectorFamily& family, const Grid& grid, double dt, double window) {
    require(geometry.kind == GeometryKind::Strip, "time reflection check is defined on the strip");
    require(!f.terms().empty() && f.terms().size() == f.support().size(),
            "time reflection check needs a source built from terms");
    std::vector<SourceTerm> reflected;
    for (auto term : f.terms()) {
        require(term.envelope.kind() == TimeFunction::Kind::Bump, "time reflection check needs bump envelopes");
        const auto& p = term.envelope.params();
        term.envelope = TimeFunction::bump(-p[0], p[1], p[2]);
        term.center = geometry.length - term.center;
        term.amplitude = -term.amplitude;
        reflected.push_back(term);
    }
    const double hi = temporal_support(f).second;
    const double s = dt * std::ceil(hi / dt - 1e-9);
    GreenOptions om;
    om.dt = dt;
    om.t_begin = 0.0;
    om.t_end = window;
    om.slice = s;
    GreenOptions op = om;
    op.t_begin = -window;
    op.t_end = 0.0;
    op.slice = -s;
    const Trajectory minus = green_minus(f, geometry, model, family, grid, om).trajectory;
    const Trajectory plus = green_plus(Source(reflected), geometry, model, family, grid, op).trajectory;
    double d = 0.0, scale = 0.0;
    for (std::size_t n = 0; n < minus.size(); ++n) {
        const std::size_t j = plus.index_of(-minus.times[n]);
        if (std::abs(plus.times[j] + minus.times[n]) > 1e-9) continue;
        const Field& a = minus.fields[n][0];
        const Field& b = plus.fields[j][0];
        Field rb(b.size());
        for (int i = 0; i < grid.nx; ++i) rb.segment<2>(2 * i) = b.segment<2>(2 * (grid.nx - 1 - i));
        d = std::max(d, h_norm(grid, a - rb));
        scale = std::max(scale, h_norm(grid, a));
    }
    return scale > 0.0 ? d / scale : d;
}

}  // namespace dirac
