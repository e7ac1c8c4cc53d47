#include "dirac/clifford.hpp"

#include <cmath>

#include "dirac/errors.hpp"

namespace dirac {

namespace {
constexpr cplx I{0.0, 1.0};
}

Mat2 pauli_x() { return (Mat2() << 0, 1, 1, 0).finished(); }
Mat2 pauli_y() { return (Mat2() << 0, -I, I, 0).finished(); }
Mat2 pauli_z() { return (Mat2() << 1, 0, 0, -1).finished(); }

CliffordModel make_clifford_model(int dim_n) {
    require(dim_n == 1 || dim_n == 2, "clifford model supports dim_n in {1, 2}");
    CliffordModel m;
    m.dim_n = dim_n;
    m.gamma_t = pauli_z();
    m.gamma_x = I * pauli_y();
    if (dim_n == 2) m.gamma_theta = I * pauli_x();
    m.sm_gram = pauli_z();
    return m;
}

Mat2 spatial_symbol(const CliffordModel& model, Covector direction) {
    const double len = std::hypot(direction.x, direction.theta);
    require(std::abs(len - 1.0) < 1e-12, "spatial_symbol: direction must have unit length");
    Mat2 g = direction.x * model.gamma_x;
    if (direction.theta != 0.0) {
        require(model.gamma_theta.has_value(), "spatial_symbol: angular direction needs dim_n = 2");
        g += direction.theta * *model.gamma_theta;
    }
    return -I * model.gamma_t * g;
}

BoundarySymbol boundary_symbol(const CliffordModel& model) {
    BoundarySymbol b;
    b.sigma_eta[0] = spatial_symbol(model, {+1.0, 0.0});
    b.sigma_eta[1] = spatial_symbol(model, {-1.0, 0.0});
    return b;
}

}  // namespace dirac
