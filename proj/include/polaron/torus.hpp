// Copyright 2026 The polaron-lab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file torus.hpp
 * @brief Block-diagonal torus model: one fiber H(P) per lattice momentum
 *        P in (2 pi / ell) Z^3, plus the periodized Yukawa kernel of the free
 *        torus resolvent.
 *
 * Fibers are labeled by their lattice coordinates; the rank-one plane-wave
 * factor of each block is never materialized.
 */

#pragma once

#include <optional>
#include <vector>

#include "polaron/dispersion.hpp"
#include "polaron/sparse_operator.hpp"

namespace polaron {

struct TorusConfig {
    double ell = 6.283185307179586;
    double fiber_cutoff = 3.0;
    double alpha = 1.0;
    GridParams grid;
    int n_max = 2;
    /// Explicit fiber lattice (integer coordinates in units of 2 pi / ell).
    /// Replaces the ball |P| <= fiber_cutoff; must be closed under P -> -P.
    std::optional<std::vector<IVec3>> fibers;

    double lattice_step() const;
    std::vector<IVec3> fiber_lattice() const;
};

struct TorusModel {
    TorusConfig config;
    FiberSpace space;
    std::vector<IVec3> fibers;
    std::vector<SparseOperator> blocks;

    Vec3 fiber_momentum(std::size_t i) const { return scaled(config.lattice_step(), fibers[i]); }
    std::size_t dimension() const { return blocks.size() * space.basis->dimension(); }

    /// The whole block-diagonal matrix; blocks in fiber order.
    SparseOperator assembled() const;
};

TorusModel assemble_torus(const TorusConfig& cfg, const SolverSettings& settings = {});

struct FiberLevels {
    IVec3 fiber;
    Vec3 momentum;
    std::vector<double> energies;  ///< lowest levels, ascending
    double residual;
};

struct TorusReport {
    double ground_energy = 0.0;
    std::vector<IVec3> argmin;  ///< fibers with E(P) within tol of the minimum
    int multiplicity = 0;       ///< levels within tol of the minimum, all blocks
    double gap = 0.0;           ///< next level above the ground cluster minus ground
    double degeneracy_tol = 1e-7;
    std::vector<FiberLevels> fibers;
    bool argmin_is_origin = false;
    /// argmin excludes 0 => multiplicity >= 2; argmin == {0} => gap > tol.
    bool mechanism_consistent = false;
};

TorusReport degeneracy_analysis(const TorusModel& model, double degeneracy_tol = 1e-7,
                                const SolverSettings& settings = {});

struct KernelValue {
    double value = 0.0;
    double last_shell_relative = 0.0;  ///< contribution of |k|_inf == image_cut over the total
    bool converged = false;            ///< last shell below 1e-12 relative
};

/// sum over |k|_inf <= image_cut of exp(-m r_k) / (4 pi r_k),
/// r_k = |x - x' - k ell|. Throws std::domain_error when x == x' mod ell Z^3.
KernelValue periodized_yukawa(const Vec3& x, const Vec3& x_prime, double ell, double mass, int image_cut);

}  // namespace polaron
