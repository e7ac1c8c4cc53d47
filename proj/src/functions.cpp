#include "dirac/functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dirac/errors.hpp"

namespace dirac {

double smooth_bump(double u) {
    if (std::abs(u) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

double smooth_bump_derivative(double u) {
    if (std::abs(u) >= 1.0) return 0.0;
    const double d = 1.0 - u * u;
    return smooth_bump(u) * (-2.0 * u / (d * d));
}

namespace {

double psi_kernel(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }
double psi_kernel_derivative(double x) { return x > 0.0 ? std::exp(-1.0 / x) / (x * x) : 0.0; }

}  // namespace

double smooth_step(double t, double a, double b) {
    const double x = (t - a) / (b - a);
    const double p = psi_kernel(x);
    const double q = psi_kernel(1.0 - x);
    return p / (p + q);
}

double smooth_step_derivative(double t, double a, double b) {
    const double x = (t - a) / (b - a);
    const double p = psi_kernel(x), q = psi_kernel(1.0 - x);
    const double dp = psi_kernel_derivative(x), dq = -psi_kernel_derivative(1.0 - x);
    const double s = p + q;
    return (dp * s - p * (dp + dq)) / (s * s) / (b - a);
}

TimeFunction TimeFunction::constant(double c) {
    TimeFunction f;
    f.kind_ = Kind::Const;
    f.p_ = {c};
    return f;
}

TimeFunction TimeFunction::affine(double a, double b) {
    TimeFunction f;
    f.kind_ = Kind::Affine;
    f.p_ = {a, b};
    return f;
}

TimeFunction TimeFunction::sin_affine(double a, double b, double omega, double phase) {
    TimeFunction f;
    f.kind_ = Kind::SinAffine;
    f.p_ = {a, b, omega, phase};
    return f;
}

TimeFunction TimeFunction::bump(double center, double half_width, double amplitude) {
    require(half_width > 0.0, "bump half width must be positive");
    TimeFunction f;
    f.kind_ = Kind::Bump;
    f.p_ = {center, half_width, amplitude};
    return f;
}

TimeFunction TimeFunction::product(TimeFunction a, TimeFunction b) {
    TimeFunction f;
    f.kind_ = Kind::Product;
    f.p_.clear();
    f.factors_ = {std::move(a), std::move(b)};
    return f;
}

double TimeFunction::operator()(double t) const {
    switch (kind_) {
        case Kind::Const: return p_[0];
        case Kind::Affine: return p_[0] + p_[1] * t;
        case Kind::SinAffine: return p_[0] + p_[1] * std::sin(p_[2] * t + p_[3]);
        case Kind::Bump: return p_[2] * smooth_bump((t - p_[0]) / p_[1]);
        case Kind::Product: return factors_[0](t) * factors_[1](t);
    }
    return 0.0;
}

double TimeFunction::derivative(double t) const {
    switch (kind_) {
        case Kind::Const: return 0.0;
        case Kind::Affine: return p_[1];
        case Kind::SinAffine: return p_[1] * p_[2] * std::cos(p_[2] * t + p_[3]);
        case Kind::Bump: return p_[2] * smooth_bump_derivative((t - p_[0]) / p_[1]) / p_[1];
        case Kind::Product:
            return factors_[0].derivative(t) * factors_[1](t) + factors_[0](t) * factors_[1].derivative(t);
    }
    return 0.0;
}

bool TimeFunction::is_constant() const {
    switch (kind_) {
        case Kind::Const: return true;
        case Kind::Affine: return p_[1] == 0.0;
        case Kind::SinAffine: return p_[1] == 0.0 || p_[2] == 0.0;
        case Kind::Bump: return p_[2] == 0.0;
        case Kind::Product: return factors_[0].is_constant() && factors_[1].is_constant();
    }
    return false;
}

namespace {

// Critical points of a + b sin(omega t + phase) inside [t0, t1].
std::vector<double> sin_critical_points(const std::vector<double>& p, double t0, double t1) {
    std::vector<double> out;
    const double omega = p[2], phase = p[3];
    if (omega == 0.0) return out;
    const double pi = std::acos(-1.0);
    const double lo = std::min(omega * t0 + phase, omega * t1 + phase);
    const double hi = std::max(omega * t0 + phase, omega * t1 + phase);
    for (double n = std::ceil((lo - pi / 2) / pi); pi / 2 + n * pi <= hi; n += 1.0)
        out.push_back((pi / 2 + n * pi - phase) / omega);
    return out;
}

template <class Cmp>
double extremum_on(const TimeFunction& f, double t0, double t1, Cmp better) {
    constexpr int kSamples = 4096;
    double m = f(t0);
    auto take = [&](double t) {
        const double v = f(t);
        if (better(v, m)) m = v;
    };
    take(t1);
    for (int i = 1; i < kSamples; ++i) take(t0 + (t1 - t0) * i / kSamples);
    if (f.kind() == TimeFunction::Kind::SinAffine)
        for (double t : sin_critical_points(f.params(), t0, t1)) take(t);
    if (f.kind() == TimeFunction::Kind::Bump) {
        const double c = f.params()[0];
        if (c >= t0 && c <= t1) take(c);
    }
    return m;
}

}  // namespace

double TimeFunction::min_on(double t0, double t1) const {
    return extremum_on(*this, t0, t1, [](double a, double b) { return a < b; });
}

double TimeFunction::max_on(double t0, double t1) const {
    return extremum_on(*this, t0, t1, [](double a, double b) { return a > b; });
}

}  // namespace dirac
