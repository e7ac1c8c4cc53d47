#pragma once

#include <random>
#include <vector>

#include "dirac/clifford.hpp"
#include "dirac/discrete.hpp"
#include "dirac/geometry.hpp"

namespace dirac {

/// amplitude * bump((x - center) / half_width) in one mode.
struct BumpProfile {
    double center = 0.5;
    double half_width = 0.1;
    Vec2 amplitude = Vec2(1.0, 0.0);
    int mode = 0;

    Vec2 value(double x) const;
    Interval support() const { return {center - half_width, center + half_width}; }
    /// Throws PreconditionViolation unless the support lies inside (0, length).
    void validate(double length) const;
};

/// Sum of bumps; the initial datum psi_0 of a Cauchy problem.
struct InitialData {
    std::vector<BumpProfile> bumps;

    Vec2 value(int mode, double x) const;
    Field sample(const Grid& grid, int mode) const;
    CausalRegion support(double length) const;
    bool empty() const { return bumps.empty(); }
};

/// Explicit solution of the transmission problem on the strip [0, length]
/// (lapse 1):  psi(t,x) = 1/2 sum_k [M_- psi0(x + kL + s) + M_+ psi0(x + kL - s)]
/// with M_- = [[1,-1],[-1,1]], M_+ = [[1,1],[1,1]] and s the elapsed proper time.
Vec2 exact_transmission(const InitialData& psi0, double s, double x, double length = 1.0);
Field exact_transmission_field(const InitialData& psi0, double s, const Grid& grid);

struct FormulaResidualReport {
    int samples = 0;
    double max_residual = 0.0;       // max |(d_t + G d_x) psi| / max |psi|
    double max_identification = 0.0;  // max |psi(t, 0) - psi(t, length)|
    double step = 0.0;
};

/// Central-difference residual of (d_t + G d_x) psi = 0, G the model's
/// Hamiltonian generator, at random (t, x) samples.
FormulaResidualReport verify_formula_solves(const InitialData& psi0, const CliffordModel& model, int samples,
                                            double step, std::uint64_t seed = 7, double length = 1.0);

/// exp(-i t D_B) psi0 through the dense Hermitian eigendecomposition.
Field dense_oracle(const SpectralCalculus& calc, const Field& psi0, double t);

}  // namespace dirac
