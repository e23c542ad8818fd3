// Copyright 2026 The polaron-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "polaron/types.hpp"

namespace polaron {

/// Fourier-space form factor 1/(4 pi |k|). Throws std::domain_error at k = 0.
double form_factor(const Vec3& k);

/// Phonon modes {k in spacing * Z^3 : 0 < |k| <= cutoff} with couplings
/// g = spacing^{3/2} / (4 pi |k|), ordered lexicographically in lattice
/// coordinates. An empty mode list is a valid grid (the free theory).
class ModeGrid {
public:
    static constexpr std::size_t kDefaultMaxModes = 5'000'000;

    static ModeGrid build(double spacing, double cutoff, std::size_t max_modes = kDefaultMaxModes);

    /// Grid with explicitly chosen modes and couplings; used for hand-made
    /// test instances. Couplings must be positive.
    static ModeGrid custom(double spacing, std::vector<IVec3> lattice, std::vector<double> couplings);

    double spacing() const { return spacing_; }
    double cutoff() const { return cutoff_; }
    std::size_t size() const { return lattice_.size(); }
    bool empty() const { return lattice_.empty(); }

    const std::vector<IVec3>& lattice() const { return lattice_; }
    const std::vector<double>& couplings() const { return couplings_; }
    Vec3 momentum(std::size_t i) const { return scaled(spacing_, lattice_[i]); }
    double coupling(std::size_t i) const { return couplings_[i]; }

private:
    double spacing_ = 1.0;
    double cutoff_ = 0.0;
    std::vector<IVec3> lattice_;
    std::vector<double> couplings_;
};

inline ModeGrid build_grid(double spacing, double cutoff,
                           std::size_t max_modes = ModeGrid::kDefaultMaxModes) {
    return ModeGrid::build(spacing, cutoff, max_modes);
}

/// Increasing list of cutoffs sharing one spacing and phonon cap.
class CutoffSchedule {
public:
    CutoffSchedule(std::vector<double> cutoffs, double spacing, int n_max);

    const std::vector<double>& cutoffs() const { return cutoffs_; }
    double spacing() const { return spacing_; }
    int n_max() const { return n_max_; }

private:
    std::vector<double> cutoffs_;
    double spacing_;
    int n_max_;
};

/// Closed form of the integral of 1/(k^2 (k^2+1)) over |k| > cutoff:
/// 4 pi (pi/2 - atan(cutoff)).
double tail_integral(double cutoff);

/// Discrete counterpart sum_i g_i^2 / (k_i^2 + 1); tends to 1/8 in the
/// continuum. Zero on an empty grid.
double riemann_selfenergy_sum(const ModeGrid& grid);

}  // namespace polaron
