// Copyright 2026 The polaron-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace polaron {

/// Vector with entries uniform in [lo, hi), drawn from raw mt19937_64 output
/// so the sequence is identical across standard library implementations.
inline Eigen::VectorXd seeded_vector(Eigen::Index n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
    std::mt19937_64 engine(seed);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
        v[i] = lo + (hi - lo) * u;
    }
    return v;
}

}  // namespace polaron
