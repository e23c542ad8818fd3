// Copyright 2026 The polaron-lab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file operator_assembly.hpp
 * @brief Matrix realizations of the fiber Hamiltonian and its pieces on a
 *        truncated occupation basis.
 *
 * With A = sum_i g_i a_i the discrete annihilation operator,
 *
 *   H(P)  = (P - P_f)^2 + N + sqrt(alpha) (A + A^T)
 *   H0(P) = (P - P_f)^2 + N + 1
 *   K     = (1 + sqrt(alpha) A H0^{-1}) H0 (1 + sqrt(alpha) H0^{-1} A^T)
 *   T     = -alpha A H0^{-1} A^T
 *
 * so that K + T = H + 1 exactly, for every alpha >= 0.
 */

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <memory>
#include <vector>

#include "polaron/fock_basis.hpp"
#include "polaron/mode_grid.hpp"
#include "polaron/sparse_operator.hpp"
#include "polaron/types.hpp"

namespace polaron {

struct FiberConfig {
    double alpha = 0.0;
    Vec3 momentum{0.0, 0.0, 0.0};
    std::shared_ptr<const ModeGrid> grid;
    int n_max = 0;

    /// Throws std::invalid_argument on alpha < 0, n_max < 0, missing grid,
    /// or a basis that was not built for this grid and n_max.
    void validate(const BasisIndex& basis) const;
};

/// Basis built over the grid's mode lattice, so states carry P_f.
BasisIndex basis_for(const ModeGrid& grid, int n_max,
                     std::size_t max_dimension = BasisIndex::kDefaultMaxDimension);

using RealSparse = Eigen::SparseMatrix<double, Eigen::RowMajor, std::ptrdiff_t>;

SparseOperator assemble_fiber(const FiberConfig& cfg, const BasisIndex& basis);
SparseOperator assemble_free(const FiberConfig& cfg, const BasisIndex& basis);

/// Diagonal of H0 = (P - P_f)^2 + N + 1.
Eigen::VectorXd free_diagonal(const FiberConfig& cfg, const BasisIndex& basis);

/// Matrix of sum_i g_i a_i. `with_alpha` multiplies by sqrt(alpha).
RealSparse assemble_annihilation(const FiberConfig& cfg, const BasisIndex& basis, bool with_alpha);

inline constexpr std::size_t kDefaultDenseCap = 2000;

struct KTPair {
    Eigen::MatrixXd K;
    Eigen::MatrixXd T;
};

/// Dense K and T; throws CapacityError above dense_cap.
KTPair assemble_KT(const FiberConfig& cfg, const BasisIndex& basis, std::size_t dense_cap = kDefaultDenseCap);

/// max |(K + T) - (H + 1)| over all entries.
double kt_identity_deviation(const FiberConfig& cfg, const BasisIndex& basis,
                             std::size_t dense_cap = kDefaultDenseCap);

/// Conjugation by (-1)^N: entry (s, s') scaled by (-1)^{n(s) + n(s')}.
SparseOperator sign_flip(const SparseOperator& op, const BasisIndex& basis);

struct NormOptions {
    double tol = 1e-8;
    int max_iterations = 200000;
    std::uint64_t seed = 42;
    std::size_t dense_cap = kDefaultDenseCap;
};

/// Operator norm of a sparse (possibly rectangular) matrix by power
/// iteration on X^T X. Throws ConvergenceError when max_iterations is hit.
double operator_norm(const RealSparse& x, const NormOptions& opts = {});

/// || sqrt(alpha) A H0^{free_power} (N+1)^{number_power} ||.
double weighted_annihilation_norm(const FiberConfig& cfg, const BasisIndex& basis, double free_power,
                                  double number_power, const NormOptions& opts = {});

/// s_j = || (sqrt(alpha) A H0^{-1})^j || for j = 1..j_max, with the
/// product applied matrix-free inside the power iteration.
std::vector<double> neumann_norms(const FiberConfig& cfg, const BasisIndex& basis, int j_max,
                                  const NormOptions& opts = {});

}  // namespace polaron
