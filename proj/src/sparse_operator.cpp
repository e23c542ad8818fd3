// Copyright 2026 The polaron-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "polaron/sparse_operator.hpp"

#include <stdexcept>
#include <utility>

namespace polaron {

SparseOperator::SparseOperator(std::size_t dimension, const std::vector<Entry>& entries) {
    const auto n = static_cast<std::ptrdiff_t>(dimension);
    std::vector<Eigen::Triplet<double, std::ptrdiff_t>> triplets;
    triplets.reserve(entries.size());
    for (const auto& e : entries) {
        if (e.row >= dimension || e.col >= dimension)
            throw std::out_of_range("SparseOperator: entry outside the matrix");
        auto r = static_cast<std::ptrdiff_t>(e.row);
        auto c = static_cast<std::ptrdiff_t>(e.col);
        if (r > c) std::swap(r, c);
        triplets.emplace_back(r, c, e.value);
    }
    upper_.resize(n, n);
    upper_.setFromTriplets(triplets.begin(), triplets.end());
    upper_.prune([](std::ptrdiff_t, std::ptrdiff_t, double v) { return v != 0.0; });
    upper_.makeCompressed();
}

SparseOperator SparseOperator::diagonal(const Eigen::VectorXd& d) {
    std::vector<Entry> entries;
    entries.reserve(static_cast<std::size_t>(d.size()));
    for (Eigen::Index i = 0; i < d.size(); ++i)
        entries.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(i), d[i]});
    return SparseOperator(static_cast<std::size_t>(d.size()), entries);
}

void SparseOperator::apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    y.noalias() = upper_.selfadjointView<Eigen::Upper>() * x;
}

Eigen::VectorXd SparseOperator::operator*(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y(x.size());
    apply(x, y);
    return y;
}

double SparseOperator::coeff(std::size_t r, std::size_t c) const {
    if (r > c) std::swap(r, c);
    return upper_.coeff(static_cast<std::ptrdiff_t>(r), static_cast<std::ptrdiff_t>(c));
}

Eigen::VectorXd SparseOperator::diagonal_values() const { return upper_.diagonal(); }

Eigen::MatrixXd SparseOperator::to_dense() const {
    Eigen::MatrixXd dense = Eigen::MatrixXd(upper_);
    dense.triangularView<Eigen::StrictlyLower>() = dense.transpose().triangularView<Eigen::StrictlyLower>();
    return dense;
}

std::vector<Entry> SparseOperator::entries() const {
    std::vector<Entry> out;
    out.reserve(stored_entries());
    for (std::ptrdiff_t r = 0; r < upper_.outerSize(); ++r)
        for (Storage::InnerIterator it(upper_, r); it; ++it)
            out.push_back({static_cast<std::size_t>(it.row()), static_cast<std::size_t>(it.col()), it.value()});
    return out;
}

SparseOperator SparseOperator::transformed(
    const std::function<double(std::size_t, std::size_t, double)>& f) const {
    auto list = entries();
    for (auto& e : list) e.value = f(e.row, e.col, e.value);
    return SparseOperator(dimension(), list);
}

bool SparseOperator::operator==(const SparseOperator& other) const {
    if (dimension() != other.dimension() || stored_entries() != other.stored_entries()) return false;
    const auto a = entries();
    const auto b = other.entries();
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].row != b[i].row || a[i].col != b[i].col || a[i].value != b[i].value) return false;
    return true;
}

}  // namespace polaron
