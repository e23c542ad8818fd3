// Copyright 2026 The polaron-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "polaron/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "polaron/random.hpp"

namespace polaron {

void fix_sign(Eigen::VectorXd& v) {
    if (v.size() == 0) return;
    Eigen::Index at = 0;
    v.cwiseAbs().maxCoeff(&at);
    if (v[at] < 0.0) v = -v;
}

namespace {

int default_krylov_dim(std::size_t n, int count) {
    const int wanted = n <= 10'000 ? std::max(200, 3 * count + 20) : std::max(64, 4 * count + 40);
    return static_cast<int>(std::min<std::size_t>(n, static_cast<std::size_t>(wanted)));
}

// Two passes of classical Gram-Schmidt against the first `k` columns.
Eigen::VectorXd project_out(const Eigen::MatrixXd& v, Eigen::Index k, Eigen::VectorXd& w) {
    Eigen::VectorXd h = v.leftCols(k).transpose() * w;
    w.noalias() -= v.leftCols(k) * h;
    const Eigen::VectorXd h2 = v.leftCols(k).transpose() * w;
    w.noalias() -= v.leftCols(k) * h2;
    return h + h2;
}

}  // namespace

std::vector<SpectralResult> lowest_eigenpairs(const LinearOperator& op, int count, const LanczosOptions& opts) {
    const auto n = static_cast<Eigen::Index>(op.dimension);
    if (n == 0) throw std::invalid_argument("eigensolver: empty operator");
    if (count < 1 || count > n) throw std::invalid_argument("eigensolver: requested eigenpair count out of range");
    if (!(opts.tol > 0.0)) throw std::invalid_argument("eigensolver: tolerance must be positive");

    const Eigen::Index m =
        std::min<Eigen::Index>(n, opts.krylov_dim > 0 ? std::max(opts.krylov_dim, count + 2)
                                                      : default_krylov_dim(op.dimension, count));

    Eigen::MatrixXd v(n, m);
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd w(n);
    Eigen::VectorXd r = Eigen::VectorXd::Zero(n);

    v.col(0) = seeded_vector(n, opts.seed);
    v.col(0).normalize();

    Eigen::Index j = 0;
    int matvecs = 0;
    std::uint64_t refills = 0;
    double op_scale = 0.0;
    double worst = std::numeric_limits<double>::infinity();

    while (true) {
        double beta = 0.0;
        Eigen::Index filled = m;
        bool budget_hit = false;
        while (j < m) {
            op.apply(v.col(j), w);
            ++matvecs;
            const Eigen::VectorXd h = project_out(v, j + 1, w);
            t.col(j).head(j + 1) = h;
            t.row(j).head(j + 1) = h.transpose();
            op_scale = std::max(op_scale, h.cwiseAbs().maxCoeff());
            beta = w.norm();
            if (j + 1 == m) {
                r = w;
                break;
            }
            if (matvecs >= opts.max_matvecs) {
                filled = j + 1;
                budget_hit = true;
                r = w;
                break;
            }
            if (beta <= 1e-13 * std::max(op_scale, 1e-300)) {
                // Invariant subspace: continue in its orthogonal complement.
                Eigen::VectorXd fresh = seeded_vector(n, opts.seed + 0x9e3779b97f4a7c15ULL * ++refills);
                project_out(v, j + 1, fresh);
                const double fn = fresh.norm();
                if (fn < 1e-8) {
                    filled = j + 1;
                    beta = 0.0;
                    r.setZero();
                    break;
                }
                v.col(j + 1) = fresh / fn;
            } else {
                v.col(j + 1) = w / beta;
            }
            ++j;
        }

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(t.topLeftCorner(filled, filled));
        const Eigen::VectorXd& theta = ritz.eigenvalues();
        const Eigen::MatrixXd& s = ritz.eigenvectors();
        const bool exhausted = !budget_hit && (filled < m || m == n);

        if (filled < count) throw ConvergenceError("eigensolver: operator space smaller than requested count", 0.0);

        bool estimates_ok = true;
        for (int i = 0; i < count; ++i) estimates_ok &= beta * std::abs(s(filled - 1, i)) <= 0.5 * opts.tol;

        if (estimates_ok || exhausted) {
            std::vector<SpectralResult> out;
            bool all_ok = true;
            worst = 0.0;
            for (int i = 0; i < count; ++i) {
                SpectralResult res;
                res.vector = v.leftCols(filled) * s.col(i);
                res.vector.normalize();
                fix_sign(res.vector);
                op.apply(res.vector, w);
                ++matvecs;
                res.energy = res.vector.dot(w);
                res.residual = (w - res.energy * res.vector).norm();
                res.converged = res.residual <= opts.tol;
                all_ok &= res.converged;
                worst = std::max(worst, res.residual);
                out.push_back(std::move(res));
            }
            for (auto& res : out) res.iterations = matvecs;
            if (all_ok) return out;
            if (exhausted)
                throw ConvergenceError("eigensolver: residual " + std::to_string(worst) +
                                           " above tolerance in the full Krylov space",
                                       worst);
        } else {
            worst = 0.0;
            for (int i = 0; i < count; ++i) worst = std::max(worst, beta * std::abs(s(filled - 1, i)));
        }

        if (matvecs >= opts.max_matvecs)
            throw ConvergenceError("eigensolver: no convergence after " + std::to_string(matvecs) +
                                       " operator applications (residual " + std::to_string(worst) + ")",
                                   worst);

        // Thick restart from the lowest Ritz vectors.
        const Eigen::Index keep = std::min<Eigen::Index>(filled - 1, std::max<Eigen::Index>(count + 5, filled / 2));
        const Eigen::MatrixXd kept = v.leftCols(filled) * s.leftCols(keep);
        v.leftCols(keep) = kept;
        t.setZero();
        t.diagonal().head(keep) = theta.head(keep);
        v.col(keep) = r / beta;
        j = keep;
    }
}

std::vector<SpectralResult> lowest_eigenpairs(const SparseOperator& op, int count, const LanczosOptions& opts) {
    return lowest_eigenpairs(as_linear_operator(op), count, opts);
}

SpectralResult ground_state(const SparseOperator& op, const LanczosOptions& opts) {
    return lowest_eigenpairs(op, 1, opts).front();
}

std::vector<double> dense_spectrum(const SparseOperator& op, int count, std::size_t dense_cap) {
    if (op.dimension() > dense_cap)
        throw CapacityError("dense_spectrum: dimension " + std::to_string(op.dimension()) + " exceeds dense cap " +
                            std::to_string(dense_cap));
    if (count < 0 || static_cast<std::size_t>(count) > op.dimension())
        throw std::invalid_argument("dense_spectrum: count out of range");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.to_dense(), Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return {ev.data(), ev.data() + count};
}

PositivityReport resolvent_positivity_audit(const SparseOperator& flipped, double lambda, std::size_t dense_cap) {
    const std::size_t dim = flipped.dimension();
    if (dim == 0) throw std::invalid_argument("positivity audit: empty operator");
    if (dim > dense_cap)
        throw CapacityError("positivity audit: dimension " + std::to_string(dim) + " exceeds dense cap " +
                            std::to_string(dense_cap));

    const Eigen::MatrixXd dense = flipped.to_dense();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
    PositivityReport rep;
    rep.lambda = lambda;
    rep.ground_energy = es.eigenvalues()[0];
    if (!(lambda > -rep.ground_energy))
        throw std::invalid_argument("positivity audit: lambda " + std::to_string(lambda) +
                                    " does not exceed -E0 = " + std::to_string(-rep.ground_energy));
    rep.gap = dim > 1 ? es.eigenvalues()[1] - es.eigenvalues()[0] : std::numeric_limits<double>::infinity();

    const auto n = static_cast<Eigen::Index>(dim);
    const Eigen::MatrixXd shifted = dense + lambda * Eigen::MatrixXd::Identity(n, n);
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("positivity audit: shifted operator is not positive definite");
    const Eigen::MatrixXd resolvent = llt.solve(Eigen::MatrixXd::Identity(n, n));

    rep.min_entry = resolvent.minCoeff();
    rep.max_entry = resolvent.maxCoeff();
    rep.strictly_positive = rep.min_entry > 1e-14 * rep.max_entry;

    Eigen::VectorXd psi = es.eigenvectors().col(0);
    fix_sign(psi);
    rep.ground_vector_min = psi.minCoeff();
    rep.positive_part = std::max(0.0, psi.maxCoeff());
    rep.negative_part = std::max(0.0, -psi.minCoeff());
    rep.single_signed = std::min(rep.positive_part, rep.negative_part) <= 1e-10;
    return rep;
}

}  // namespace polaron
