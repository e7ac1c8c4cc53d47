#pragma once

#include <memory>
#include <string>
#include <vector>

namespace dirac {

/// Scalar function of time drawn from a small analytic vocabulary:
/// constants, affine and sin-affine profiles, smooth bumps, and products.
/// Everything that varies in time (lapse, radius, rotation angle, temporal
/// source envelopes) is one of these so runs stay bit-reproducible.
class TimeFunction {
public:
    enum class Kind { Const, Affine, SinAffine, Bump, Product };

    static TimeFunction constant(double c);
    /// a + b t
    static TimeFunction affine(double a, double b);
    /// a + b sin(omega t + phase)
    static TimeFunction sin_affine(double a, double b, double omega, double phase);
    /// amplitude * bump((t - center) / half_width)
    static TimeFunction bump(double center, double half_width, double amplitude = 1.0);
    static TimeFunction product(TimeFunction f, TimeFunction g);

    double operator()(double t) const;
    double derivative(double t) const;

    Kind kind() const { return kind_; }
    bool is_constant() const;
    /// Minimum and maximum over [t0, t1] by dense sampling plus endpoints.
    double min_on(double t0, double t1) const;
    double max_on(double t0, double t1) const;
    const std::vector<double>& params() const { return p_; }
    const std::vector<TimeFunction>& factors() const { return factors_; }

private:
    Kind kind_ = Kind::Const;
    std::vector<double> p_{0.0};
    std::vector<TimeFunction> factors_;
};

/// Standard C-infinity bump exp(1 - 1/(1-u^2)) for |u| < 1, zero otherwise.
/// Peak value 1 at u = 0.
double smooth_bump(double u);
double smooth_bump_derivative(double u);

/// Smooth step rising from 0 at a to 1 at b (built from the bump's
/// exp(-1/x) kernel), used for temporal cutoffs.
double smooth_step(double t, double a, double b);
double smooth_step_derivative(double t, double a, double b);

}  // namespace dirac
