#include "dirac/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dirac/errors.hpp"

namespace dirac {

namespace {
constexpr cplx I{0.0, 1.0};
}

Grid Grid::make(int nx, double length) {
    if (nx < 16) throw GridTooCoarse("grid needs at least 16 nodes, got " + std::to_string(nx));
    require(length > 0.0, "grid length must be positive");
    Grid g;
    g.nx = nx;
    g.length = length;
    g.h = length / (nx - 1);
    return g;
}

Eigen::VectorXd Grid::dof_weights() const {
    Eigen::VectorXd w(dofs());
    for (int i = 0; i < nx; ++i) w(2 * i) = w(2 * i + 1) = weight(i);
    return w;
}

cplx h_inner(const Grid& g, const Field& u, const Field& v) {
    cplx s = 0.0;
    for (int i = 0; i < g.nx; ++i) s += g.weight(i) * (std::conj(u(2 * i)) * v(2 * i) + std::conj(u(2 * i + 1)) * v(2 * i + 1));
    return s;
}

double h_norm(const Grid& g, const Field& u) {
    return std::sqrt(kernels::weighted_norm_sq_serial(g.nx, g.h, {u.data(), static_cast<std::size_t>(u.size())}));
}

DiscreteOperator::DiscreteOperator(Grid grid, const CliffordModel& model, double lapse, double mass, int mode,
                                   double t)
    : grid_(grid), mode_(mode), t_(t), mu_(mass) {
    require(lapse > 0.0, "lapse must be positive");
    coeffs_.nx = grid_.nx;
    coeffs_.h = grid_.h;
    coeffs_.scale = lapse;
    coeffs_.gamma_x = spatial_symbol(model, {1.0, 0.0});
    coeffs_.mass = Mat2::Zero();
    if (mass != 0.0) {
        require(model.dim_n == 2, "a nonzero mode mass needs the cylinder model");
        coeffs_.mass = I * mass * spatial_symbol(model, {0.0, 1.0});
    }

    const int n = grid_.nx;
    const double h = grid_.h;
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(static_cast<std::size_t>(12 * n));
    auto add_block = [&](int i, int j, const Mat2& b) {
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                if (b(r, c) != cplx(0.0)) trip.emplace_back(2 * i + r, 2 * j + c, lapse * b(r, c));
    };
    const Mat2& gx = coeffs_.gamma_x;
    for (int i = 0; i < n; ++i) {
        if (i == 0) {
            add_block(0, 0, -gx / h);
            add_block(0, 1, gx / h);
        } else if (i == n - 1) {
            add_block(i, i - 1, -gx / h);
            add_block(i, i, gx / h);
        } else {
            add_block(i, i - 1, -gx / (2.0 * h));
            add_block(i, i + 1, gx / (2.0 * h));
        }
        add_block(i, i, coeffs_.mass);
    }
    sparse_.resize(grid_.dofs(), grid_.dofs());
    sparse_.setFromTriplets(trip.begin(), trip.end());
    sparse_.makeCompressed();
}

Field DiscreteOperator::apply(const Field& psi) const {
    Field out(psi.size());
    kernels::apply_dirac_omp(coeffs_, {psi.data(), static_cast<std::size_t>(psi.size())},
                             {out.data(), static_cast<std::size_t>(out.size())});
    return out;
}

cplx DiscreteOperator::green_boundary_form(const Field& u, const Field& v) const {
    const int last = grid_.nx - 1;
    const Mat2 gstar = coeffs_.gamma_x.adjoint();
    const Vec2 u0 = u.segment<2>(0), v0 = v.segment<2>(0);
    const Vec2 ul = u.segment<2>(2 * last), vl = v.segment<2>(2 * last);
    return coeffs_.scale * (ul.dot(gstar * vl) - u0.dot(gstar * v0));
}

double DiscreteOperator::boundary_flux(const Field& psi) const {
    return (I * green_boundary_form(psi, psi)).real();
}

DiscreteOperator build_operator(const Geometry& geometry, const CliffordModel& model, const Grid& grid, int mode,
                                double t) {
    return DiscreteOperator(grid, model, geometry.lapse(t), geometry.mode_mass(mode, t), mode, t);
}

Eigen::Vector4cd trace(const Field& psi) {
    const Eigen::Index n = psi.size();
    Eigen::Vector4cd r;
    r << psi(0), psi(1), psi(n - 2), psi(n - 1);
    return r;
}

ConstraintSubspace::ConstraintSubspace(const DiscreteOperator& op, const Mat4& projector, int order)
    : grid_(op.grid()), order_(order), dofs_(op.grid().dofs()) {
    require(order >= 1, "constraint order must be at least 1");
    const int n = dofs_;

    // Functionals whose vanishing encodes trace(psi) in ran P: conjugated right
    // singular vectors of id - P with non-negligible singular value.
    Eigen::JacobiSVD<Mat4> svd(Mat4::Identity() - projector, Eigen::ComputeFullV);
    const double smax = std::max(svd.singularValues()(0), 1e-300);
    std::vector<Eigen::Vector4cd> functionals;
    for (int q = 0; q < 4; ++q)
        if (svd.singularValues()(q) > 1e-8 * smax && svd.singularValues()(q) > 1e-14)
            functionals.push_back(svd.matrixV().col(q));

    // Each constraint row acts on the trace of D^l psi.
    const std::array<int, 4> trace_dofs{0, 1, n - 2, n - 1};
    Eigen::MatrixXcd g(static_cast<Eigen::Index>(functionals.size()) * order, n);
    g.setZero();
    Eigen::MatrixXcd trace_map = Eigen::MatrixXcd::Zero(4, n);
    for (int q = 0; q < 4; ++q) trace_map(q, trace_dofs[q]) = 1.0;
    Eigen::MatrixXcd power = trace_map;  // R D^l
    for (int l = 0; l < order; ++l) {
        if (l > 0) power = (power * op.sparse()).eval();
        for (std::size_t f = 0; f < functionals.size(); ++f)
            g.row(static_cast<Eigen::Index>(l * functionals.size() + f)) = functionals[f].adjoint() * power;
    }

    // scale to H^{1/2} coordinates and orthonormalize the rows
    const Eigen::VectorXd w = grid_.dof_weights();
    const Eigen::VectorXd w_isqrt = w.cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXcd gs = g * w_isqrt.cast<cplx>().asDiagonal();
    if (gs.rows() == 0) {
        rows_.resize(n, 0);
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gs * gs.adjoint());
        const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
        const double emax = ev.maxCoeff();
        std::vector<int> keep;
        for (int q = 0; q < ev.size(); ++q) {
            const double rel = std::sqrt(ev(q) / emax);
            if (rel > 1e-12 && rel <= 1e-8)
                throw DegenerateConstraints("constraint rows are numerically rank deficient (relative singular value " +
                                            std::to_string(rel) + ")");
            if (rel > 1e-8) keep.push_back(q);
        }
        rows_.resize(n, static_cast<Eigen::Index>(keep.size()));
        for (std::size_t j = 0; j < keep.size(); ++j)
            rows_.col(static_cast<Eigen::Index>(j)) =
                gs.adjoint() * es.eigenvectors().col(keep[j]) / std::sqrt(ev(keep[j]));
    }

    // Pi = I - H^{-1/2} Y Y^* H^{1/2}, supported on the dofs the constraints touch
    std::vector<int> support;
    for (int p = 0; p < n; ++p)
        if (rows_.rows() > 0 && rows_.cols() > 0 && rows_.row(p).cwiseAbs().maxCoeff() > 0.0) support.push_back(p);
    std::vector<Eigen::Triplet<cplx>> trip;
    for (int p = 0; p < n; ++p) trip.emplace_back(p, p, 1.0);
    for (int p : support)
        for (int q : support) {
            const cplx yy = rows_.row(p).dot(rows_.row(q));  // conj(Y_p) . Y_q
            trip.emplace_back(p, q, -w_isqrt(p) * std::conj(yy) / w_isqrt(q));
        }
    projector_.resize(n, n);
    projector_.setFromTriplets(trip.begin(), trip.end());
    projector_.makeCompressed();
}

double ConstraintSubspace::constraint_residual(const Field& psi) const {
    if (rows_.cols() == 0) return 0.0;
    const Eigen::VectorXd w_sqrt = grid_.dof_weights().cwiseSqrt();
    const Eigen::VectorXcd scaled = w_sqrt.cast<cplx>().asDiagonal() * psi;
    return (rows_.adjoint() * scaled).cwiseAbs().maxCoeff();
}

const Eigen::MatrixXcd& ConstraintSubspace::basis() const {
    if (basis_) return *basis_;
    const int n = dofs_;
    const int r = codimension();
    // Columns of Y live on a handful of dofs; the complement is the identity
    // elsewhere plus a small dense complement on that support.
    std::vector<int> support;
    for (int p = 0; p < n; ++p)
        if (r > 0 && rows_.row(p).cwiseAbs().maxCoeff() > 0.0) support.push_back(p);
    const int s = static_cast<int>(support.size());
    Eigen::MatrixXcd local(s, r);
    for (int a = 0; a < s; ++a) local.row(a) = rows_.row(support[a]);
    Eigen::MatrixXcd local_complement(s, s - r);
    if (s > 0) {
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(local);
        const Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(s, s);
        local_complement = q.rightCols(s - r);
    }
    auto b = std::make_shared<Eigen::MatrixXcd>(Eigen::MatrixXcd::Zero(n, n - r));
    const Eigen::VectorXd w_isqrt = grid_.dof_weights().cwiseSqrt().cwiseInverse();
    std::set<int> in_support(support.begin(), support.end());
    int col = 0;
    int local_used = 0;
    for (int p = 0; p < n; ++p) {
        if (in_support.count(p)) {
            // interleave the local complement columns at the first support dofs
            if (local_used < s - r) {
                for (int a = 0; a < s; ++a) (*b)(support[a], col) = local_complement(a, local_used) * w_isqrt(support[a]);
                ++local_used;
                ++col;
            }
        } else {
            (*b)(p, col) = w_isqrt(p);
            ++col;
        }
    }
    basis_ = b;
    return *basis_;
}

ConstraintSubspace constraint_subspace(const DiscreteOperator& op, const Mat4& projector, int order) {
    return ConstraintSubspace(op, projector, order);
}

CompressedOperator constrained_operator(const DiscreteOperator& op, const ConstraintSubspace& v, double max_defect) {
    const Eigen::MatrixXcd& b = v.basis();
    const Eigen::MatrixXcd db = op.sparse() * b;
    const Eigen::VectorXd w = op.grid().dof_weights();
    const Eigen::MatrixXcd l = b.adjoint() * (w.cast<cplx>().asDiagonal() * db);
    CompressedOperator out;
    const double scale = std::max(l.cwiseAbs().maxCoeff(), 1e-300);
    out.hermitian_defect = (l - l.adjoint()).cwiseAbs().maxCoeff() / scale;
    if (out.hermitian_defect > max_defect)
        throw SelfadjointnessViolation("compressed operator has relative Hermitian defect " +
                                       std::to_string(out.hermitian_defect) +
                                       "; the boundary flux does not vanish on V_B");
    out.matrix = 0.5 * (l + l.adjoint());
    return out;
}

SparseMat projected_operator(const DiscreteOperator& op, const ConstraintSubspace& v) {
    SparseMat m = v.projector() * op.sparse() * v.projector();
    m.prune(cplx(0.0), 0.0);
    m.makeCompressed();
    return m;
}

SpectralCalculus::SpectralCalculus(const DiscreteOperator& op, const ConstraintSubspace& v)
    : grid_(op.grid()), basis_(v.basis()) {
    const CompressedOperator c = constrained_operator(op, v);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(c.matrix);
    lambda_ = es.eigenvalues();
    u_ = es.eigenvectors();
    phi_ = basis_ * u_;
    weights_ = grid_.dof_weights().cast<cplx>();
}

Eigen::VectorXcd SpectralCalculus::to_eigen(const Field& psi) const {
    return phi_.adjoint() * weights_.cwiseProduct(psi);
}

Field SpectralCalculus::from_eigen(const Eigen::VectorXcd& c) const { return phi_ * c; }

Field mollifier_apply(const SpectralCalculus& calc, double epsilon, const Field& psi) {
    require(epsilon >= 0.0, "mollifier: epsilon >= 0 required");
    return calc.apply([epsilon](double lam) { return mollifier_symbol(epsilon, lam); }, psi);
}

namespace {

// Symmetric square root and its inverse of a positive definite matrix.
std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> sqrt_pair(const Eigen::MatrixXcd& k) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(k);
    const Eigen::VectorXd s = es.eigenvalues().cwiseSqrt();
    const Eigen::MatrixXcd& v = es.eigenvectors();
    return {v * s.cast<cplx>().asDiagonal() * v.adjoint(), v * s.cwiseInverse().cast<cplx>().asDiagonal() * v.adjoint()};
}

Eigen::MatrixXcd norm_weight(const Grid& grid, int k_norm) {
    const int n = grid.nx;
    Eigen::MatrixXd ks = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) ks(i, i) = grid.weight(i);
    if (k_norm == 1) {
        Eigen::MatrixXd d1 = Eigen::MatrixXd::Zero(n, n);
        d1(0, 0) = -1.0 / grid.h;
        d1(0, 1) = 1.0 / grid.h;
        d1(n - 1, n - 2) = -1.0 / grid.h;
        d1(n - 1, n - 1) = 1.0 / grid.h;
        for (int i = 1; i < n - 1; ++i) {
            d1(i, i - 1) = -0.5 / grid.h;
            d1(i, i + 1) = 0.5 / grid.h;
        }
        Eigen::MatrixXd hm = ks;
        ks += d1.transpose() * hm * d1;
    }
    Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) k(2 * i, 2 * j) = k(2 * i + 1, 2 * j + 1) = ks(i, j);
    return k;
}

}  // namespace

std::vector<ContinuityRow> family_continuity_probe(const Geometry& geometry, const CliffordModel& model,
                                                   const ProjectorFamily& family, const Grid& grid, double t0,
                                                   double t1, int samples, double epsilon, int k_norm) {
    require(samples >= 3, "continuity probe needs at least three samples");
    require(k_norm == 0 || k_norm == 1, "continuity probe supports k_norm in {0, 1}");
    const auto [w_half, w_ihalf] = sqrt_pair(norm_weight(grid, k_norm));
    const auto modes = geometry.modes();
    auto generator = [&](double t) {
        const ProjectorSample p = family(t);
        std::vector<Eigen::MatrixXcd> out;
        for (std::size_t m = 0; m < modes.size(); ++m) {
            const DiscreteOperator op = build_operator(geometry, model, grid, modes[m], t);
            const ConstraintSubspace v = constraint_subspace(op, p[m], 1);
            const SpectralCalculus calc(op, v);
            out.push_back(calc.full_matrix([epsilon](double lam) { return lam * mollifier_symbol(epsilon, lam); }));
        }
        return out;
    };
    std::vector<ContinuityRow> rows;
    double prev_t = t0;
    auto prev = generator(t0);
    for (int i = 1; i < samples; ++i) {
        const double t = t0 + (t1 - t0) * i / (samples - 1);
        auto cur = generator(t);
        double diff = 0.0;
        for (std::size_t m = 0; m < cur.size(); ++m)
            diff = std::max(diff, operator_norm(w_half * (cur[m] - prev[m]) * w_ihalf));
        rows.push_back({prev_t, t, diff});
        prev = std::move(cur);
        prev_t = t;
    }
    return rows;
}

}  // namespace dirac
