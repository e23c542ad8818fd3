// Copyright 2026 The polaron-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "polaron/fock_basis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace polaron {

namespace {

constexpr std::size_t kSaturated = std::numeric_limits<std::size_t>::max();

// Number of occupation vectors of length m with entries summing to r,
// C(r + m - 1, r). Saturates at kSaturated.
std::size_t compositions(std::size_t r, std::size_t m) {
    if (m == 0) return r == 0 ? 1 : 0;
    unsigned __int128 value = 1;
    for (std::size_t i = 1; i <= r; ++i) {
        value = value * (m - 1 + i) / i;
        if (value > kSaturated) return kSaturated;
    }
    return static_cast<std::size_t>(value);
}

std::size_t saturating_add(std::size_t a, std::size_t b) {
    return (a > kSaturated - b) ? kSaturated : a + b;
}

}  // namespace

std::uint32_t OccupationState::count(std::uint32_t mode) const {
    auto it = std::lower_bound(occupations.begin(), occupations.end(), mode,
                               [](const ModeOccupation& o, std::uint32_t m) { return o.first < m; });
    return (it != occupations.end() && it->first == mode) ? it->second : 0;
}

std::size_t BasisIndex::count_states(std::size_t modes, int n_max) {
    std::size_t total = 0;
    for (int n = 0; n <= n_max; ++n) total = saturating_add(total, compositions(static_cast<std::size_t>(n), modes));
    return total;
}

BasisIndex BasisIndex::enumerate(std::size_t modes, int n_max, std::size_t max_dimension) {
    std::vector<IVec3> zeros(modes, IVec3{0, 0, 0});
    return enumerate(zeros, n_max, max_dimension);
}

BasisIndex BasisIndex::enumerate(std::span<const IVec3> mode_lattice, int n_max,
                                 std::size_t max_dimension) {
    if (n_max < 0) throw std::invalid_argument("enumerate_basis: n_max must be >= 0");
    const std::size_t m = mode_lattice.size();
    if (m > std::numeric_limits<std::uint32_t>::max())
        throw CapacityError("enumerate_basis: mode count exceeds 32-bit mode indices");

    const std::size_t dim = count_states(m, n_max);
    if (dim > max_dimension)
        throw CapacityError("enumerate_basis: dimension " +
                            (dim == kSaturated ? std::string("(overflow)") : std::to_string(dim)) +
                            " exceeds limit " + std::to_string(max_dimension));

    BasisIndex b;
    b.mode_count_ = m;
    b.n_max_ = n_max;
    b.mode_lattice_.assign(mode_lattice.begin(), mode_lattice.end());
    b.offsets_.reserve(static_cast<std::size_t>(n_max) + 2);
    b.modes_.reserve(dim * b.stride());
    b.number_.reserve(dim);
    b.momentum_.reserve(dim);

    std::vector<std::uint32_t> current;
    current.reserve(static_cast<std::size_t>(n_max));

    auto emit = [&](int n) {
        IVec3 p{0, 0, 0};
        for (auto mode : current) p = p + b.mode_lattice_[mode];
        for (std::size_t s = 0; s < b.stride(); ++s) b.modes_.push_back(s < current.size() ? current[s] : 0);
        b.number_.push_back(n);
        b.momentum_.push_back(p);
    };

    // Ascending lexicographic order of occupation vectors: the vector whose
    // first occupied mode (from `from`) is later sorts first; for the same
    // first mode, a smaller count sorts first.
    auto generate = [&](auto&& self, std::size_t from, int remaining, int n) -> void {
        if (remaining == 0) {
            emit(n);
            return;
        }
        for (std::size_t p = m; p-- > from;) {
            for (int c = 1; c <= remaining; ++c) {
                if (p == m - 1 && c != remaining) continue;
                for (int r = 0; r < c; ++r) current.push_back(static_cast<std::uint32_t>(p));
                self(self, p + 1, remaining - c, n);
                current.resize(current.size() - static_cast<std::size_t>(c));
            }
        }
    };

    for (int n = 0; n <= n_max; ++n) {
        b.offsets_.push_back(b.number_.size());
        generate(generate, 0, n, n);
    }
    b.offsets_.push_back(b.number_.size());
    return b;
}

OccupationState BasisIndex::state(std::size_t i) const {
    OccupationState s;
    s.total_number = number_[i];
    s.momentum_quanta = momentum_[i];
    for (auto mode : mode_list(i)) {
        if (!s.occupations.empty() && s.occupations.back().first == mode)
            ++s.occupations.back().second;
        else
            s.occupations.emplace_back(mode, 1u);
    }
    return s;
}

std::size_t BasisIndex::rank_in_block(std::span<const std::uint32_t> sorted_modes) const {
    // rank = sum over occupied modes j of sum_{c < n_j} W(remaining_j - c, M - 1 - j)
    std::size_t rank = 0;
    std::size_t remaining = sorted_modes.size();
    std::size_t pos = 0;
    while (pos < sorted_modes.size()) {
        const std::uint32_t mode = sorted_modes[pos];
        std::size_t cnt = 0;
        while (pos < sorted_modes.size() && sorted_modes[pos] == mode) {
            ++cnt;
            ++pos;
        }
        const std::size_t tail = mode_count_ - 1 - mode;
        for (std::size_t c = 0; c < cnt; ++c) rank += compositions(remaining - c, tail);
        remaining -= cnt;
    }
    return rank;
}

std::optional<std::size_t> BasisIndex::index_of(const OccupationState& s) const {
    std::vector<std::uint32_t> list;
    std::uint32_t prev = 0;
    bool first = true;
    for (const auto& [mode, cnt] : s.occupations) {
        if (mode >= mode_count_ || cnt == 0) return std::nullopt;
        if (!first && mode <= prev) return std::nullopt;
        first = false;
        prev = mode;
        list.insert(list.end(), cnt, mode);
    }
    if (static_cast<int>(list.size()) != s.total_number || s.total_number > n_max_) return std::nullopt;
    return offsets_[list.size()] + rank_in_block(list);
}

std::optional<LadderResult> BasisIndex::apply_ladder(const OccupationState& s, std::uint32_t mode,
                                                     Ladder direction) const {
    if (mode >= mode_count_) throw std::invalid_argument("apply_ladder: mode index out of range");
    LadderResult out{s, 0.0};
    auto& occ = out.state.occupations;
    auto it = std::lower_bound(occ.begin(), occ.end(), mode,
                               [](const ModeOccupation& o, std::uint32_t m) { return o.first < m; });
    const bool present = it != occ.end() && it->first == mode;
    const std::uint32_t n_i = present ? it->second : 0;

    if (direction == Ladder::raise) {
        if (s.total_number >= n_max_) return std::nullopt;
        if (present)
            ++it->second;
        else
            occ.insert(it, {mode, 1u});
        out.state.total_number += 1;
        out.state.momentum_quanta = out.state.momentum_quanta + mode_lattice_[mode];
        out.amplitude = std::sqrt(static_cast<double>(n_i) + 1.0);
    } else {
        if (n_i == 0) return std::nullopt;
        if (--it->second == 0) occ.erase(it);
        out.state.total_number -= 1;
        out.state.momentum_quanta = out.state.momentum_quanta - mode_lattice_[mode];
        out.amplitude = std::sqrt(static_cast<double>(n_i));
    }
    return out;
}

std::optional<RaisedIndex> BasisIndex::raise(std::size_t i, std::uint32_t mode) const {
    const int n = number_[i];
    if (n >= n_max_) return std::nullopt;
    auto list = mode_list(i);
    std::uint32_t buf[64];
    std::vector<std::uint32_t> heap;
    std::uint32_t* raised = buf;
    if (static_cast<std::size_t>(n) + 1 > std::size(buf)) {
        heap.resize(static_cast<std::size_t>(n) + 1);
        raised = heap.data();
    }
    auto at = std::upper_bound(list.begin(), list.end(), mode);
    const auto lo = std::lower_bound(list.begin(), at, mode);
    const auto existing = static_cast<double>(at - lo);
    std::copy(list.begin(), at, raised);
    raised[at - list.begin()] = mode;
    std::copy(at, list.end(), raised + (at - list.begin()) + 1);
    const std::size_t idx =
        offsets_[static_cast<std::size_t>(n) + 1] + rank_in_block({raised, static_cast<std::size_t>(n) + 1});
    return RaisedIndex{idx, std::sqrt(existing + 1.0)};
}

}  // namespace polaron
