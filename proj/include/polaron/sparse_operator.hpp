// Copyright 2026 The polaron-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstddef>
#include <functional>
#include <vector>

namespace polaron {

struct Entry {
    std::size_t row;
    std::size_t col;
    double value;
};

/// Real symmetric sparse matrix with upper-triangular storage, so the
/// transpose is equal by construction. Exact zeros are never stored.
class SparseOperator {
public:
    using Storage = Eigen::SparseMatrix<double, Eigen::RowMajor, std::ptrdiff_t>;

    SparseOperator() = default;

    /// Entries may be given in either triangle; (r, c) and (c, r) are the
    /// same element. Duplicates are summed.
    SparseOperator(std::size_t dimension, const std::vector<Entry>& entries);

    static SparseOperator diagonal(const Eigen::VectorXd& d);

    std::size_t dimension() const { return static_cast<std::size_t>(upper_.rows()); }
    std::size_t stored_entries() const { return static_cast<std::size_t>(upper_.nonZeros()); }

    /// y = A x.
    void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
    Eigen::VectorXd operator*(const Eigen::VectorXd& x) const;

    double coeff(std::size_t r, std::size_t c) const;
    Eigen::VectorXd diagonal_values() const;
    Eigen::MatrixXd to_dense() const;

    /// Upper-triangle entries in row-major order.
    std::vector<Entry> entries() const;

    /// Copy with every stored entry passed through f(row, col, value).
    SparseOperator transformed(const std::function<double(std::size_t, std::size_t, double)>& f) const;

    const Storage& upper() const { return upper_; }

    bool operator==(const SparseOperator& other) const;

private:
    Storage upper_;
};

/// Matrix-free symmetric operator: dimension plus y = A x.
struct LinearOperator {
    std::size_t dimension = 0;
    std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> apply;
};

inline LinearOperator as_linear_operator(const SparseOperator& op) {
    return {op.dimension(), [&op](const Eigen::VectorXd& x, Eigen::VectorXd& y) { op.apply(x, y); }};
}

}  // namespace polaron
