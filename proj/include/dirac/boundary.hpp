#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dirac/clifford.hpp"
#include "dirac/geometry.hpp"

namespace dirac {

using Mat4 = Eigen::Matrix4cd;

/// Boundary operators A_k(t) = mu_k(t) S_c on the two boundary circles of the
/// cylinder, S_c = i sigma_eta_c^{-1} sigma(e_theta). On the strip the
/// boundary is two points and A vanishes identically.
class BoundaryOperatorSpec {
public:
    BoundaryOperatorSpec(Geometry geometry, CliffordModel model);

    const Geometry& geometry() const { return geometry_; }
    const CliffordModel& model() const { return model_; }
    const BoundarySymbol& symbols() const { return symbols_; }
    /// Block symbol diag(sigma_eta_0, sigma_eta_1) on the trace space C^2 + C^2.
    const Mat4& block_symbol() const { return block_symbol_; }
    bool has_nontrivial_operator() const { return geometry_.kind == GeometryKind::Cylinder; }

    Mat2 involution(int component) const { return involution_[component]; }
    Mat2 boundary_operator(int k, int component, double t) const;

private:
    Geometry geometry_;
    CliffordModel model_;
    BoundarySymbol symbols_;
    Mat4 block_symbol_;
    std::array<Mat2, 2> involution_;
};

struct ModeSpectrum {
    int mode = 0;
    /// Sorted eigenvalues of A_k(t) on component 0 and on component 1.
    std::array<std::array<double, 2>, 2> eigenvalues{};
};

/// Eigenvalues of every mode matrix A_k(t), |k| <= K. With `require_trivial_kernel`
/// any eigenvalue within `tol` of zero raises SpectralFlowUnsupported.
std::vector<ModeSpectrum> boundary_spectrum(const BoundaryOperatorSpec& spec, double t,
                                            bool require_trivial_kernel = false, double tol = 1e-12);

/// Spectrum of the circle operator sigma_eta^{-1} sigma(e_theta) r^{-1} d_theta on
/// antiperiodic spinors, discretized with `points` Fourier collocation nodes and
/// diagonalized densely. Sorted ascending.
std::vector<double> circle_operator_spectrum(const BoundaryOperatorSpec& spec, int component, double t,
                                             int points);

enum class FamilyKind { Transmission, Chirality, APS, RotatedGrassmannian, Custom };
std::string to_string(FamilyKind kind);

/// One block per carried mode, in Geometry::modes() order. Each block acts on
/// (trace at x = 0, trace at x = length) in C^2 + C^2.
using ProjectorSample = std::vector<Mat4>;

/// Time family t -> P(t) of boundary projectors.
class ProjectorFamily {
public:
    using Evaluator = std::function<ProjectorSample(double)>;

    ProjectorFamily(FamilyKind kind, std::string name, Evaluator eval, bool time_dependent,
                    bool local = false)
        : kind_(kind), name_(std::move(name)), eval_(std::move(eval)), time_dependent_(time_dependent),
          local_(local) {}

    ProjectorSample operator()(double t) const { return eval_(t); }
    FamilyKind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    bool time_dependent() const { return time_dependent_; }
    /// Local (pointwise) conditions do not couple the two boundary components.
    bool local() const { return local_; }
    double lipschitz_constant() const { return lipschitz_; }
    void set_lipschitz_constant(double l) { lipschitz_ = l; }

private:
    FamilyKind kind_;
    std::string name_;
    Evaluator eval_;
    bool time_dependent_;
    bool local_;
    double lipschitz_ = 0.0;
};

/// chi^-(A_k(t)) per component: projector onto the negative eigenspace.
ProjectorSample aps_projector(const BoundaryOperatorSpec& spec, double t);
ProjectorFamily aps_family(const BoundaryOperatorSpec& spec);
/// chi^+(A_k(t)); the complement of the APS projector.
ProjectorSample positive_spectral_projector(const BoundaryOperatorSpec& spec, double t);

ProjectorFamily transmission_family(const BoundaryOperatorSpec& spec);
ProjectorFamily chirality_family(const BoundaryOperatorSpec& spec);
/// P(t) = R(phi(t)) P_base(t) R(phi(t))^*, R = exp(phi sigma_eta_0) on the x = 0 block.
ProjectorFamily rotated_family(const BoundaryOperatorSpec& spec, ProjectorFamily base, TimeFunction phi);
/// Constant family from user-supplied per-mode 4x4 matrices (not validated here).
ProjectorFamily custom_family(std::vector<Mat4> blocks);

struct AdmissibilitySample {
    double t = 0.0;
    double idempotence_defect = 0.0;   // ||P^2 - P||
    double hermiticity_defect = 0.0;   // ||P^* - P||
    double grassmannian_defect = 0.0;  // ||P - id - S P S||
    double anticommutator_defect = 0.0;  // ||A S + S A|| over modes
    double min_fredholm_singular_value = 0.0;  // min_k sigma_min(P - chi^+(A)); NaN on the strip
    int min_rank = 0;
    int max_rank = 0;
};

struct AdmissibilityReport {
    std::string family;
    double tolerance = 1e-10;
    double fredholm_floor = 1e-8;
    std::vector<AdmissibilitySample> samples;
    std::vector<double> continuity;  // ||P(t_{i+1}) - P(t_i)||, max over modes
    double max_identity_defect = 0.0;
    double min_fredholm_singular_value = 0.0;
    bool pass = false;
    std::string weighting_note;
    std::vector<std::string> failures;
};

AdmissibilityReport check_admissible(const ProjectorFamily& family, const BoundaryOperatorSpec& spec,
                                     double t0, double t1, int samples, double tolerance = 1e-10);

double operator_norm(const Eigen::MatrixXcd& m);

}  // namespace dirac
