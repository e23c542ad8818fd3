// Copyright 2026 The polaron-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "polaron/mode_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace polaron {

double form_factor(const Vec3& k) {
    const double r = norm(k);
    if (!(r > 0.0)) throw std::domain_error("form_factor: singular at k = 0");
    return 1.0 / (4.0 * std::numbers::pi * r);
}

ModeGrid ModeGrid::build(double spacing, double cutoff, std::size_t max_modes) {
    if (!(spacing > 0.0) || !std::isfinite(spacing))
        throw std::invalid_argument("build_grid: spacing (delta) must be positive");
    if (!(cutoff >= 0.0) || !std::isfinite(cutoff))
        throw std::invalid_argument("build_grid: cutoff (Lambda) must be non-negative");

    ModeGrid g;
    g.spacing_ = spacing;
    g.cutoff_ = cutoff;

    // |n| <= cutoff/spacing, with a relative slack so that exact shells
    // (e.g. cutoff = 16, spacing = 0.4) survive the division.
    const double ratio = cutoff / spacing;
    const double limit2 = ratio * ratio * (1.0 + 1e-12);
    const auto reach = static_cast<std::int64_t>(std::floor(ratio * (1.0 + 1e-12)));

    const double volume = 4.0 / 3.0 * std::numbers::pi * ratio * ratio * ratio;
    if (volume > 1.5 * static_cast<double>(max_modes) + 64.0)
        throw CapacityError("build_grid: about " + std::to_string(static_cast<long long>(volume)) +
                            " modes exceeds limit " + std::to_string(max_modes));

    const double weight = std::pow(spacing, 1.5);
    for (std::int64_t x = -reach; x <= reach; ++x) {
        for (std::int64_t y = -reach; y <= reach; ++y) {
            for (std::int64_t z = -reach; z <= reach; ++z) {
                const IVec3 n{x, y, z};
                const auto n2 = norm2(n);
                if (n2 == 0 || static_cast<double>(n2) > limit2) continue;
                g.lattice_.push_back(n);
                g.couplings_.push_back(weight * form_factor(scaled(spacing, n)));
            }
        }
    }
    if (g.lattice_.size() > max_modes)
        throw CapacityError("build_grid: " + std::to_string(g.lattice_.size()) +
                            " modes exceeds limit " + std::to_string(max_modes));
    return g;
}

ModeGrid ModeGrid::custom(double spacing, std::vector<IVec3> lattice, std::vector<double> couplings) {
    if (!(spacing > 0.0)) throw std::invalid_argument("custom grid: spacing must be positive");
    if (lattice.size() != couplings.size())
        throw std::invalid_argument("custom grid: lattice and coupling counts differ");
    ModeGrid g;
    g.spacing_ = spacing;
    for (std::size_t i = 0; i < lattice.size(); ++i) {
        if (norm2(lattice[i]) == 0) throw std::invalid_argument("custom grid: mode at the origin");
        if (!(couplings[i] > 0.0)) throw std::invalid_argument("custom grid: couplings must be positive");
        g.cutoff_ = std::max(g.cutoff_, spacing * std::sqrt(static_cast<double>(norm2(lattice[i]))));
    }
    g.lattice_ = std::move(lattice);
    g.couplings_ = std::move(couplings);
    return g;
}

CutoffSchedule::CutoffSchedule(std::vector<double> cutoffs, double spacing, int n_max)
    : cutoffs_(std::move(cutoffs)), spacing_(spacing), n_max_(n_max) {
    if (cutoffs_.empty()) throw std::invalid_argument("cutoff schedule is empty");
    for (std::size_t i = 0; i < cutoffs_.size(); ++i) {
        if (!(cutoffs_[i] > 0.0)) throw std::invalid_argument("cutoff schedule: values must be positive");
        if (i > 0 && !(cutoffs_[i] > cutoffs_[i - 1]))
            throw std::invalid_argument("cutoff schedule: values must be strictly increasing");
    }
    if (!(spacing > 0.0)) throw std::invalid_argument("cutoff schedule: spacing must be positive");
    if (n_max < 0) throw std::invalid_argument("cutoff schedule: n_max must be >= 0");
}

double tail_integral(double cutoff) {
    if (cutoff < 0.0) throw std::invalid_argument("tail_integral: cutoff must be >= 0");
    return 4.0 * std::numbers::pi * (std::numbers::pi / 2.0 - std::atan(cutoff));
}

double riemann_selfenergy_sum(const ModeGrid& grid) {
    double sum = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double g = grid.coupling(i);
        sum += g * g / (norm2(grid.momentum(i)) + 1.0);
    }
    return sum;
}

}  // namespace polaron
