// Copyright 2026 The polaron-lab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file eigensolver.hpp
 * @brief Lowest eigenpairs of symmetric operators and Perron-Frobenius audits.
 *
 * The sparse solver is a thick-restart Lanczos iteration with full
 * reorthogonalization inside a bounded Krylov block: the block holds the
 * whole Krylov sequence for small problems and is restarted from the lowest
 * Ritz vectors for large ones. A single starting vector cannot resolve
 * exact degeneracies except through invariant-subspace breakdowns, which are
 * continued from a fresh orthogonal random vector.
 */

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "polaron/operator_assembly.hpp"
#include "polaron/sparse_operator.hpp"

namespace polaron {

struct LanczosOptions {
    double tol = 1e-9;            ///< absolute residual ||(H - E) psi||
    std::uint64_t seed = 42;      ///< starting-vector seed
    int max_matvecs = 50000;
    int krylov_dim = 0;           ///< 0 selects by dimension
};

struct SpectralResult {
    double energy = 0.0;
    Eigen::VectorXd vector;  ///< unit norm, largest-magnitude entry positive
    double residual = 0.0;
    int iterations = 0;      ///< operator applications
    bool converged = false;
};

/// Lowest `count` eigenpairs, ascending. Throws ConvergenceError when
/// max_matvecs is exhausted.
std::vector<SpectralResult> lowest_eigenpairs(const LinearOperator& op, int count, const LanczosOptions& opts = {});

SpectralResult ground_state(const SparseOperator& op, const LanczosOptions& opts = {});
std::vector<SpectralResult> lowest_eigenpairs(const SparseOperator& op, int count, const LanczosOptions& opts = {});

/// k smallest eigenvalues by a full dense eigensolve (test oracle).
std::vector<double> dense_spectrum(const SparseOperator& op, int count, std::size_t dense_cap = kDefaultDenseCap);

struct PositivityReport {
    double lambda = 0.0;
    double min_entry = 0.0;  ///< of (op + lambda)^{-1}
    double max_entry = 0.0;
    bool strictly_positive = false;
    double ground_vector_min = 0.0;  ///< after the sign fix
    double gap = 0.0;                ///< E1 - E0
    double ground_energy = 0.0;
    double negative_part = 0.0;  ///< max |Psi_-| entry
    double positive_part = 0.0;  ///< max |Psi_+| entry
    bool single_signed = false;  ///< Psi_+ = 0 or Psi_- = 0 within 1e-10
};

/// Dense audit of an already sign-flipped operator: entrywise positivity of
/// (op + lambda)^{-1}, sign structure of the ground vector and the gap.
/// Throws std::invalid_argument when lambda <= -E0.
PositivityReport resolvent_positivity_audit(const SparseOperator& flipped, double lambda,
                                            std::size_t dense_cap = kDefaultDenseCap);

/// Makes the largest-magnitude entry positive.
void fix_sign(Eigen::VectorXd& v);

}  // namespace polaron
