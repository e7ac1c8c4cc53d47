#include "dirac/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <unsupported/Eigen/MatrixFunctions>

#include "dirac/errors.hpp"

namespace dirac {

namespace {

constexpr cplx I{0.0, 1.0};

Mat4 block_diag(const Mat2& a, const Mat2& b) {
    Mat4 m = Mat4::Zero();
    m.topLeftCorner<2, 2>() = a;
    m.bottomRightCorner<2, 2>() = b;
    return m;
}

// Orthogonal projector onto the eigenvectors of a Hermitian 2x2 matrix with
// eigenvalue sign `sign` (+1: positive, -1: non-positive).
Mat2 spectral_projector(const Mat2& a, int sign) {
    Eigen::SelfAdjointEigenSolver<Mat2> es(a);
    Mat2 p = Mat2::Zero();
    for (int i = 0; i < 2; ++i) {
        const bool take = sign > 0 ? es.eigenvalues()(i) > 0.0 : es.eigenvalues()(i) <= 0.0;
        if (take) p += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
    }
    return p;
}

}  // namespace

double operator_norm(const Eigen::MatrixXcd& m) {
    if (m.size() == 0) return 0.0;
    if (m.rows() <= 16 && m.cols() <= 16) return Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues()(0);
    return Eigen::BDCSVD<Eigen::MatrixXcd>(m).singularValues()(0);
}

std::string to_string(FamilyKind kind) {
    switch (kind) {
        case FamilyKind::Transmission: return "transmission";
        case FamilyKind::Chirality: return "chirality";
        case FamilyKind::APS: return "aps";
        case FamilyKind::RotatedGrassmannian: return "rotated";
        case FamilyKind::Custom: return "custom";
    }
    return "unknown";
}

BoundaryOperatorSpec::BoundaryOperatorSpec(Geometry geometry, CliffordModel model)
    : geometry_(std::move(geometry)), model_(std::move(model)) {
    require(model_.dim_n == geometry_.spatial_dim(), "clifford model dimension does not match geometry");
    symbols_ = boundary_symbol(model_);
    block_symbol_ = block_diag(symbols_.sigma_eta[0], symbols_.sigma_eta[1]);
    for (int c = 0; c < 2; ++c) {
        if (geometry_.kind == GeometryKind::Cylinder) {
            const Mat2 sigma_theta = spatial_symbol(model_, {0.0, 1.0});
            involution_[c] = I * symbols_.sigma_eta[c].inverse() * sigma_theta;
        } else {
            involution_[c] = Mat2::Zero();
        }
    }
}

Mat2 BoundaryOperatorSpec::boundary_operator(int k, int component, double t) const {
    return geometry_.mode_mass(k, t) * involution_[component];
}

std::vector<ModeSpectrum> boundary_spectrum(const BoundaryOperatorSpec& spec, double t,
                                            bool require_trivial_kernel, double tol) {
    const auto& g = spec.geometry();
    if (g.kind == GeometryKind::Cylinder) require(g.radius(t) > 0.0, "boundary_spectrum: r(t) > 0 required");
    std::vector<ModeSpectrum> out;
    for (int k : g.modes()) {
        ModeSpectrum ms;
        ms.mode = k;
        for (int c = 0; c < 2; ++c) {
            Eigen::SelfAdjointEigenSolver<Mat2> es(spec.boundary_operator(k, c, t));
            ms.eigenvalues[c] = {es.eigenvalues()(0), es.eigenvalues()(1)};
            if (require_trivial_kernel) {
                for (double lam : ms.eigenvalues[c])
                    if (std::abs(lam) < tol)
                        throw SpectralFlowUnsupported("boundary operator has an eigenvalue " + std::to_string(lam) +
                                                      " at t = " + std::to_string(t) + ", mode " +
                                                      std::to_string(k));
            }
        }
        out.push_back(ms);
    }
    return out;
}

std::vector<double> circle_operator_spectrum(const BoundaryOperatorSpec& spec, int component, double t,
                                             int points) {
    require(spec.geometry().kind == GeometryKind::Cylinder, "circle spectrum needs the cylinder");
    require(points >= 4 && points % 2 == 0, "circle spectrum needs an even number of nodes");
    const double pi = std::acos(-1.0);
    const double r = spec.geometry().radius(t);
    const int m = points;
    Eigen::MatrixXcd v(m, m);
    Eigen::VectorXcd freq(m);
    for (int j = 0; j < m; ++j) {
        const double theta = 2.0 * pi * j / m;
        for (int q = 0; q < m; ++q) {
            const double kk = (q - m / 2) + 0.5;
            v(j, q) = std::exp(I * kk * theta) / std::sqrt(double(m));
        }
    }
    for (int q = 0; q < m; ++q) freq(q) = I * ((q - m / 2) + 0.5);
    const Eigen::MatrixXcd d_theta = v * freq.asDiagonal() * v.adjoint();
    const Mat2 sigma_theta = spatial_symbol(spec.model(), {0.0, 1.0});
    const Mat2 tangential = spec.symbols().sigma_eta[component].inverse() * sigma_theta;
    Eigen::MatrixXcd a(2 * m, 2 * m);
    for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) a.block(p * m, q * m, m, m) = tangential(p, q) * d_theta / r;
    const Eigen::MatrixXcd herm = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
    std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    return out;
}

ProjectorSample aps_projector(const BoundaryOperatorSpec& spec, double t) {
    require(spec.has_nontrivial_operator(), "APS conditions need a boundary operator with trivial kernel (cylinder)");
    boundary_spectrum(spec, t, /*require_trivial_kernel=*/true);
    ProjectorSample out;
    for (int k : spec.geometry().modes())
        out.push_back(block_diag(spectral_projector(spec.boundary_operator(k, 0, t), -1),
                                 spectral_projector(spec.boundary_operator(k, 1, t), -1)));
    return out;
}

ProjectorSample positive_spectral_projector(const BoundaryOperatorSpec& spec, double t) {
    ProjectorSample out;
    for (int k : spec.geometry().modes())
        out.push_back(block_diag(spectral_projector(spec.boundary_operator(k, 0, t), +1),
                                 spectral_projector(spec.boundary_operator(k, 1, t), +1)));
    return out;
}

ProjectorFamily aps_family(const BoundaryOperatorSpec& spec) {
    require(spec.has_nontrivial_operator(), "APS conditions are only offered on the cylinder");
    // Eigenvectors of mu_k(t) S are t-independent unless mu_k changes sign, which
    // r(t) > 0 excludes; the family is nevertheless evaluated pointwise.
    return ProjectorFamily(FamilyKind::APS, "aps", [spec](double t) { return aps_projector(spec, t); },
                           /*time_dependent=*/false);
}

ProjectorFamily transmission_family(const BoundaryOperatorSpec& spec) {
    require(spec.geometry().kind == GeometryKind::Strip, "transmission conditions need the strip");
    Mat4 p;
    p << Mat2::Identity(), Mat2::Identity(), Mat2::Identity(), Mat2::Identity();
    p *= 0.5;
    const std::size_t n = spec.geometry().modes().size();
    return ProjectorFamily(FamilyKind::Transmission, "transmission",
                           [p, n](double) { return ProjectorSample(n, p); }, false);
}

ProjectorFamily chirality_family(const BoundaryOperatorSpec& spec) {
    const auto& model = spec.model();
    const auto& sym = spec.symbols();
    std::array<Mat2, 2> chi;
    for (int c = 0; c < 2; ++c) chi[c] = model.gamma_t * sym.sigma_eta[c];
    const Mat2 id = Mat2::Identity();
    for (int c = 0; c < 2; ++c) {
        const double inv = (chi[c] * chi[c] - id).norm();
        const double herm = (chi[c] - chi[c].adjoint()).norm();
        const double anti = (chi[c] * sym.sigma_eta[c] + sym.sigma_eta[c] * chi[c]).norm();
        const double anti_a = (chi[c] * spec.involution(c) + spec.involution(c) * chi[c]).norm();
        if (inv > 1e-14 || herm > 1e-14 || anti > 1e-14 || anti_a > 1e-14)
            throw ConventionError("no boundary chirality anticommuting with the conormal symbol in this representation");
    }
    const Mat4 p = block_diag(0.5 * (id + chi[0]), 0.5 * (id + chi[1]));
    const std::size_t n = spec.geometry().modes().size();
    return ProjectorFamily(FamilyKind::Chirality, "chirality", [p, n](double) { return ProjectorSample(n, p); },
                           false, /*local=*/true);
}

ProjectorFamily rotated_family(const BoundaryOperatorSpec& spec, ProjectorFamily base, TimeFunction phi) {
    const Mat2 gen = spec.symbols().sigma_eta[0];
    const Mat4 generator = block_diag(gen, Mat2::Zero());
    if ((generator * spec.block_symbol() - spec.block_symbol() * generator).norm() > 1e-14)
        throw ConventionError("rotation generator does not commute with the boundary symbol");
    if ((gen + gen.adjoint()).norm() > 1e-14) throw ConventionError("rotation generator is not skew-Hermitian");
    const bool local = base.local();
    ProjectorFamily fam(
        FamilyKind::RotatedGrassmannian, "rotated(" + base.name() + ")",
        [base, phi, generator](double t) {
            const Mat4 r = (phi(t) * generator).exp();
            ProjectorSample s = base(t);
            for (auto& p : s) p = r * p * r.adjoint();
            return s;
        },
        /*time_dependent=*/!phi.is_constant() || base.time_dependent(), local);
    // ||R P R^* - P|| <= 2 ||R - id|| <= 2 ||generator|| |phi|
    fam.set_lipschitz_constant(2.0 * operator_norm(generator));
    return fam;
}

ProjectorFamily custom_family(std::vector<Mat4> blocks) {
    return ProjectorFamily(FamilyKind::Custom, "custom", [blocks](double) { return blocks; }, false);
}

AdmissibilityReport check_admissible(const ProjectorFamily& family, const BoundaryOperatorSpec& spec,
                                     double t0, double t1, int samples, double tolerance) {
    require(samples >= 2, "check_admissible: at least two samples");
    require(t0 <= t1, "check_admissible: t0 <= t1");
    AdmissibilityReport rep;
    rep.family = family.name();
    rep.tolerance = tolerance;
    rep.weighting_note =
        "lapse and volume weights are scalar functions of t on the desk geometries, so the weighted "
        "conditions N^(1/2) B_t and U(t) N^(n/2) B_t coincide with B_t";
    const Mat4 id = Mat4::Identity();
    const Mat4& sigma = spec.block_symbol();
    const bool cylinder = spec.has_nontrivial_operator();
    const auto modes = spec.geometry().modes();
    rep.min_fredholm_singular_value = cylinder ? std::numeric_limits<double>::infinity()
                                               : std::numeric_limits<double>::quiet_NaN();
    ProjectorSample prev;
    for (int i = 0; i < samples; ++i) {
        const double t = t0 + (t1 - t0) * i / (samples - 1);
        AdmissibilitySample s;
        s.t = t;
        const ProjectorSample p = family(t);
        if (p.size() != modes.size()) {
            rep.failures.push_back("family returned " + std::to_string(p.size()) + " blocks for " +
                                   std::to_string(modes.size()) + " modes");
            rep.pass = false;
            return rep;
        }
        ProjectorSample chi_plus;
        if (cylinder) chi_plus = positive_spectral_projector(spec, t);
        s.min_rank = 4;
        s.max_rank = 0;
        s.min_fredholm_singular_value =
            cylinder ? std::numeric_limits<double>::infinity() : std::numeric_limits<double>::quiet_NaN();
        for (std::size_t m = 0; m < p.size(); ++m) {
            const Mat4& pm = p[m];
            s.idempotence_defect = std::max(s.idempotence_defect, operator_norm(pm * pm - pm));
            s.hermiticity_defect = std::max(s.hermiticity_defect, operator_norm(pm.adjoint() - pm));
            s.grassmannian_defect = std::max(s.grassmannian_defect, operator_norm(pm - id - sigma * pm * sigma));
            Eigen::JacobiSVD<Mat4> svd(pm);
            int rank = 0;
            for (int q = 0; q < 4; ++q) rank += svd.singularValues()(q) > 0.5 ? 1 : 0;
            s.min_rank = std::min(s.min_rank, rank);
            s.max_rank = std::max(s.max_rank, rank);
            if (cylinder) {
                Eigen::JacobiSVD<Mat4> f(pm - chi_plus[m]);
                s.min_fredholm_singular_value = std::min(s.min_fredholm_singular_value, f.singularValues()(3));
                for (int c = 0; c < 2; ++c) {
                    const Mat2 a = spec.boundary_operator(modes[m], c, t);
                    const Mat2& e = spec.symbols().sigma_eta[c];
                    s.anticommutator_defect = std::max(s.anticommutator_defect, operator_norm(a * e + e * a));
                }
            }
        }
        if (!prev.empty()) {
            double d = 0.0;
            for (std::size_t m = 0; m < p.size(); ++m) d = std::max(d, operator_norm(p[m] - prev[m]));
            rep.continuity.push_back(d);
        }
        prev = p;
        rep.max_identity_defect = std::max({rep.max_identity_defect, s.idempotence_defect, s.hermiticity_defect,
                                            s.grassmannian_defect, s.anticommutator_defect});
        if (cylinder)
            rep.min_fredholm_singular_value = std::min(rep.min_fredholm_singular_value, s.min_fredholm_singular_value);
        if (s.min_rank != 2 || s.max_rank != 2)
            rep.failures.push_back("rank of P is not half the trace dimension at t = " + std::to_string(t));
        rep.samples.push_back(s);
    }
    if (rep.max_identity_defect >= rep.tolerance)
        rep.failures.push_back("projector identity defect " + std::to_string(rep.max_identity_defect) +
                               " exceeds tolerance");
    if (cylinder && !(rep.min_fredholm_singular_value > rep.fredholm_floor))
        rep.failures.push_back("P - chi+(A) is not uniformly invertible on the truncation");
    rep.pass = rep.failures.empty();
    return rep;
}

}  // namespace dirac
