// Copyright 2026 The polaron-lab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file fock_basis.hpp
 * @brief Truncated bosonic Fock basis over a finite set of phonon modes.
 *
 * States are multisets of mode indices of size n <= n_max. The basis is
 * ordered by total phonon number, then ascending lexicographic order of the
 * occupation vector (n_0, n_1, ..., n_{M-1}); the vacuum is index 0. The
 * reverse lookup is an exact combinatorial rank, no hashing or floating point.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "polaron/types.hpp"

namespace polaron {

/// (mode index, count) with count > 0.
using ModeOccupation = std::pair<std::uint32_t, std::uint32_t>;

struct OccupationState {
    std::vector<ModeOccupation> occupations;  ///< sorted by mode, no zero counts
    int total_number = 0;
    IVec3 momentum_quanta{0, 0, 0};  ///< P_f / spacing, exact

    Vec3 phonon_momentum(double spacing) const { return scaled(spacing, momentum_quanta); }
    std::uint32_t count(std::uint32_t mode) const;

    bool operator==(const OccupationState&) const = default;
};

enum class Ladder { raise, lower };

struct LadderResult {
    OccupationState state;
    double amplitude;
};

/// Raised-state lookup used by matrix assembly.
struct RaisedIndex {
    std::size_t index;
    double amplitude;  ///< sqrt(n_mode + 1)
};

class BasisIndex {
public:
    static constexpr std::size_t kDefaultMaxDimension = 20'000'000;

    /// Builds the basis for `modes` modes; momentum quanta are all zero.
    static BasisIndex enumerate(std::size_t modes, int n_max,
                                std::size_t max_dimension = kDefaultMaxDimension);

    /// Builds the basis with per-mode lattice momenta, so states carry P_f.
    static BasisIndex enumerate(std::span<const IVec3> mode_lattice, int n_max,
                                std::size_t max_dimension = kDefaultMaxDimension);

    /// Number of states, computed without enumerating. Saturates at SIZE_MAX.
    static std::size_t count_states(std::size_t modes, int n_max);

    std::size_t dimension() const { return number_.size(); }
    std::size_t mode_count() const { return mode_count_; }
    int n_max() const { return n_max_; }

    OccupationState state(std::size_t i) const;
    std::optional<std::size_t> index_of(const OccupationState& s) const;

    int number(std::size_t i) const { return number_[i]; }
    const IVec3& momentum_quanta(std::size_t i) const { return momentum_[i]; }

    /// Sorted (non-decreasing) mode list of state i, length number(i).
    std::span<const std::uint32_t> mode_list(std::size_t i) const {
        return {modes_.data() + i * stride(), static_cast<std::size_t>(number_[i])};
    }

    /// First index of the n-phonon block.
    std::size_t block_begin(int n) const { return offsets_[static_cast<std::size_t>(n)]; }
    std::size_t block_end(int n) const { return offsets_[static_cast<std::size_t>(n) + 1]; }

    /// a*_mode or a_mode acting on a canonical state. Raise is absent on the
    /// n_max layer, lower is absent when the mode is empty.
    std::optional<LadderResult> apply_ladder(const OccupationState& s, std::uint32_t mode,
                                             Ladder direction) const;

    /// Index-level raise, absent on the top layer.
    std::optional<RaisedIndex> raise(std::size_t i, std::uint32_t mode) const;

private:
    BasisIndex() = default;
    std::size_t stride() const { return n_max_ > 0 ? static_cast<std::size_t>(n_max_) : 1; }
    std::size_t rank_in_block(std::span<const std::uint32_t> sorted_modes) const;

    std::size_t mode_count_ = 0;
    int n_max_ = 0;
    std::vector<IVec3> mode_lattice_;
    std::vector<std::size_t> offsets_;
    std::vector<std::uint32_t> modes_;  // dimension * stride, padded
    std::vector<int> number_;
    std::vector<IVec3> momentum_;
};

/// Convenience free function mirroring BasisIndex::enumerate.
inline BasisIndex enumerate_basis(std::size_t modes, int n_max,
                                  std::size_t max_dimension = BasisIndex::kDefaultMaxDimension) {
    return BasisIndex::enumerate(modes, n_max, max_dimension);
}

}  // namespace polaron
