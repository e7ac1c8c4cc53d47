#include <doctest.h>

#include "dirac/boundary.hpp"
#include "helpers.hpp"

using namespace dirac;

namespace {

BoundaryOperatorSpec cylinder_spec(int k, TimeFunction r) {
    return BoundaryOperatorSpec(Geometry::cylinder(k, std::move(r)), make_clifford_model(2));
}

BoundaryOperatorSpec strip_spec() { return BoundaryOperatorSpec(Geometry::strip(), make_clifford_model(1)); }

}  // namespace

TEST_SUITE("boundary") {

TEST_CASE("mode spectra") {
    const auto s1 = boundary_spectrum(cylinder_spec(0, TimeFunction::constant(1.0)), 0.0);
    REQUIRE(s1.size() == 1);
    for (int c = 0; c < 2; ++c) {
        CHECK(s1[0].eigenvalues[c][0] == doctest::Approx(-0.5).epsilon(1e-14));
        CHECK(s1[0].eigenvalues[c][1] == doctest::Approx(0.5).epsilon(1e-14));
    }
    const auto s2 = boundary_spectrum(cylinder_spec(3, TimeFunction::constant(2.0)), 0.0);
    const auto& k3 = s2.back();
    CHECK(k3.mode == 3);
    CHECK(k3.eigenvalues[0][0] == doctest::Approx(-1.75).epsilon(1e-14));
    CHECK(k3.eigenvalues[0][1] == doctest::Approx(1.75).epsilon(1e-14));

    std::vector<double> all;
    for (const auto& ms : boundary_spectrum(cylinder_spec(1, TimeFunction::constant(1.0)), 0.0))
        for (int c = 0; c < 2; ++c) all.insert(all.end(), ms.eigenvalues[c].begin(), ms.eigenvalues[c].end());
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < all.size(); ++i) CHECK(std::abs(all[i] + all[all.size() - 1 - i]) < 1e-14);
}

TEST_CASE("circle operator matches the mode spectrum") {
    const auto spec = cylinder_spec(4, TimeFunction::constant(1.5));
    const auto ev = circle_operator_spectrum(spec, 0, 0.0, 32);
    for (int k = -4; k <= 3; ++k) {
        const double target = (k + 0.5) / 1.5;
        double best = 1e300;
        for (double e : ev) best = std::min(best, std::abs(e - target));
        CHECK(best < 1e-10);
    }
}

TEST_CASE("APS projector picks the negative eigenspace and is constant in r") {
    const auto spec = cylinder_spec(2, TimeFunction::sin_affine(1.0, 0.1, 1.0, 0.0));
    const ProjectorSample p0 = aps_projector(spec, 0.0);
    const ProjectorSample p1 = aps_projector(spec, 1.3);
    const auto modes = spec.geometry().modes();
    for (std::size_t m = 0; m < modes.size(); ++m) {
        CHECK(testutil::max_abs(p0[m] - p1[m]) < 1e-14);
        CHECK(testutil::max_abs(p0[m] * p0[m] - p0[m]) < 1e-14);
        for (int c = 0; c < 2; ++c) {
            const Mat2 a = spec.boundary_operator(modes[m], c, 0.0);
            Eigen::SelfAdjointEigenSolver<Mat2> es(a);
            const Mat2 block = p0[m].block<2, 2>(2 * c, 2 * c);
            CHECK((block * es.eigenvectors().col(0) - es.eigenvectors().col(0)).norm() < 1e-14);
            CHECK((block * es.eigenvectors().col(1)).norm() < 1e-14);
        }
        const ProjectorSample pp = positive_spectral_projector(spec, 0.0);
        CHECK(testutil::max_abs(p0[m] + pp[m] - Mat4::Identity()) < 1e-14);
        CHECK(testutil::max_abs(p0[m] * pp[m]) < 1e-14);
    }
}

TEST_CASE("transmission projector is the diagonal") {
    const auto spec = strip_spec();
    const Mat4 p = transmission_family(spec)(0.0).front();
    const Vec2 w(cplx(0.3, 1.0), cplx(-2.0, 0.5));
    Eigen::Vector4cd diag, anti;
    diag << w, w;
    anti << w, -w;
    CHECK((p * diag - diag).norm() < 1e-15);
    CHECK((p * anti).norm() < 1e-15);
    const Mat4& s = spec.block_symbol();
    CHECK(testutil::max_abs(s * p * s - (p - Mat4::Identity())) < 1e-14);
}

TEST_CASE("chirality involution") {
    const auto spec = strip_spec();
    const auto& model = spec.model();
    for (int c = 0; c < 2; ++c) {
        const Mat2 chi = model.gamma_t * spec.symbols().sigma_eta[c];
        CHECK(testutil::max_abs(chi * chi - Mat2::Identity()) < 1e-15);
        CHECK(testutil::max_abs(chi.adjoint() - chi) < 1e-15);
        CHECK(testutil::max_abs(chi * spec.symbols().sigma_eta[c] + spec.symbols().sigma_eta[c] * chi) < 1e-14);
    }
    const Mat4 p = chirality_family(spec)(0.0).front();
    CHECK(testutil::max_abs(p * (Mat4::Identity() - p)) < 1e-15);
    CHECK(chirality_family(spec).local());
    CHECK(!transmission_family(spec).local());
}

TEST_CASE("admissibility") {
    const auto aps_spec = cylinder_spec(3, TimeFunction::sin_affine(1.0, 0.2, 1.0, 0.0));
    const auto rep = check_admissible(aps_family(aps_spec), aps_spec, 0.0, 1.0, 50, 1e-12);
    CHECK(rep.pass);
    CHECK(rep.max_identity_defect < 1e-12);
    CHECK(rep.min_fredholm_singular_value == doctest::Approx(1.0).epsilon(1e-12));

    const auto spec = strip_spec();
    CHECK(check_admissible(transmission_family(spec), spec, 0.0, 1.0, 10).pass);
    CHECK(check_admissible(chirality_family(spec), spec, 0.0, 1.0, 10).pass);

    Mat4 broken = transmission_family(spec)(0.0).front();
    broken(0, 1) += 1e-3;
    const auto bad = check_admissible(custom_family({broken}), spec, 0.0, 1.0, 5);
    CHECK(!bad.pass);
    CHECK(bad.samples.front().hermiticity_defect == doctest::Approx(1e-3).epsilon(1e-6));
}

TEST_CASE("rotated family") {
    const auto spec = strip_spec();
    const auto base = transmission_family(spec);
    const auto still = rotated_family(spec, base, TimeFunction::constant(0.0));
    CHECK(testutil::max_abs(still(0.4).front() - base(0.4).front()) == 0.0);

    const auto moving = rotated_family(spec, base, TimeFunction::affine(0.0, 1.0));
    CHECK(moving.time_dependent());
    const Mat4 p0 = moving(0.0).front();
    const double s1 = operator_norm(moving(1e-3).front() - p0) / 1e-3;
    const double s2 = operator_norm(moving(5e-4).front() - p0) / 5e-4;
    CHECK(s1 > 0.0);
    CHECK(s1 <= moving.lipschitz_constant());
    CHECK(std::abs(s1 - s2) / s2 < 1e-3);
    CHECK(check_admissible(moving, spec, 0.0, 1.0, 50).pass);
}

TEST_CASE("strip boundary operator vanishes") {
    const auto spec = strip_spec();
    CHECK(!spec.has_nontrivial_operator());
    CHECK(testutil::max_abs(spec.boundary_operator(0, 0, 0.0)) == 0.0);
}

}
