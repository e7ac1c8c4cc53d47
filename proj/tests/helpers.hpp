#pragma once

#include <random>

#include "dirac/discrete.hpp"

namespace testutil {

inline dirac::Field random_field(int dofs, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    dirac::Field f(dofs);
    for (int i = 0; i < dofs; ++i) f(i) = dirac::cplx(nd(rng), nd(rng));
    return f;
}

inline double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace testutil
