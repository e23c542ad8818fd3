// Copyright 2026 The polaron-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "polaron/operator_assembly.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "polaron/random.hpp"

namespace polaron {

namespace {

using Triplet = Eigen::Triplet<double, std::ptrdiff_t>;

double kinetic(const FiberConfig& cfg, const BasisIndex& basis, std::size_t i) {
    const Vec3 pf = scaled(cfg.grid->spacing(), basis.momentum_quanta(i));
    return norm2(cfg.momentum - pf);
}

void require_dense(std::size_t dim, std::size_t cap, const char* what) {
    if (dim > cap)
        throw CapacityError(std::string(what) + ": dimension " + std::to_string(dim) + " exceeds dense cap " +
                            std::to_string(cap));
}

}  // namespace

void FiberConfig::validate(const BasisIndex& basis) const {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("fiber config: alpha must be >= 0");
    if (n_max < 0) throw std::invalid_argument("fiber config: n_max must be >= 0");
    if (!grid) throw std::invalid_argument("fiber config: missing mode grid");
    if (basis.mode_count() != grid->size() || basis.n_max() != n_max)
        throw std::invalid_argument("fiber config: basis (modes " + std::to_string(basis.mode_count()) +
                                    ", n_max " + std::to_string(basis.n_max()) + ") does not match grid (modes " +
                                    std::to_string(grid->size()) + ", n_max " + std::to_string(n_max) + ")");
}

BasisIndex basis_for(const ModeGrid& grid, int n_max, std::size_t max_dimension) {
    return BasisIndex::enumerate(grid.lattice(), n_max, max_dimension);
}

SparseOperator assemble_fiber(const FiberConfig& cfg, const BasisIndex& basis) {
    cfg.validate(basis);
    const std::size_t dim = basis.dimension();
    const auto m = static_cast<std::uint32_t>(basis.mode_count());
    const double root_alpha = std::sqrt(cfg.alpha);

    std::vector<Entry> entries;
    const std::size_t raisable = cfg.n_max > 0 ? basis.block_begin(cfg.n_max) : 0;
    entries.reserve(dim + (cfg.alpha > 0.0 ? raisable * m : 0));
    for (std::size_t i = 0; i < dim; ++i) {
        entries.push_back({i, i, kinetic(cfg, basis, i) + basis.number(i)});
        if (cfg.alpha == 0.0) continue;
        for (std::uint32_t mode = 0; mode < m; ++mode) {
            const auto up = basis.raise(i, mode);
            if (!up) break;
            entries.push_back({i, up->index, root_alpha * cfg.grid->coupling(mode) * up->amplitude});
        }
    }
    return SparseOperator(dim, entries);
}

Eigen::VectorXd free_diagonal(const FiberConfig& cfg, const BasisIndex& basis) {
    cfg.validate(basis);
    Eigen::VectorXd d(static_cast<Eigen::Index>(basis.dimension()));
    for (std::size_t i = 0; i < basis.dimension(); ++i)
        d[static_cast<Eigen::Index>(i)] = kinetic(cfg, basis, i) + basis.number(i) + 1.0;
    return d;
}

SparseOperator assemble_free(const FiberConfig& cfg, const BasisIndex& basis) {
    return SparseOperator::diagonal(free_diagonal(cfg, basis));
}

RealSparse assemble_annihilation(const FiberConfig& cfg, const BasisIndex& basis, bool with_alpha) {
    cfg.validate(basis);
    const auto dim = static_cast<std::ptrdiff_t>(basis.dimension());
    const auto m = static_cast<std::uint32_t>(basis.mode_count());
    const double scale = with_alpha ? std::sqrt(cfg.alpha) : 1.0;

    std::vector<Triplet> triplets;
    const std::size_t raisable = cfg.n_max > 0 ? basis.block_begin(cfg.n_max) : 0;
    triplets.reserve(raisable * m);
    for (std::size_t i = 0; i < raisable; ++i) {
        for (std::uint32_t mode = 0; mode < m; ++mode) {
            const auto up = basis.raise(i, mode);
            // <i| a_mode |up> = sqrt(n_mode(up)) = amplitude of the raise
            triplets.emplace_back(static_cast<std::ptrdiff_t>(i), static_cast<std::ptrdiff_t>(up->index),
                                  scale * cfg.grid->coupling(mode) * up->amplitude);
        }
    }
    RealSparse a(dim, dim);
    a.setFromTriplets(triplets.begin(), triplets.end());
    a.prune([](std::ptrdiff_t, std::ptrdiff_t, double v) { return v != 0.0; });
    a.makeCompressed();
    return a;
}

KTPair assemble_KT(const FiberConfig& cfg, const BasisIndex& basis, std::size_t dense_cap) {
    cfg.validate(basis);
    require_dense(basis.dimension(), dense_cap, "assemble_KT");
    const Eigen::VectorXd h0 = free_diagonal(cfg, basis);
    const Eigen::VectorXd h0_inv = h0.cwiseInverse();
    const Eigen::MatrixXd a = Eigen::MatrixXd(assemble_annihilation(cfg, basis, false));
    const auto n = a.rows();
    const double root_alpha = std::sqrt(cfg.alpha);

    const Eigen::MatrixXd a_h0inv = a * h0_inv.asDiagonal();
    const Eigen::MatrixXd b = Eigen::MatrixXd::Identity(n, n) + root_alpha * a_h0inv;

    KTPair out;
    out.K = b * h0.asDiagonal() * b.transpose();
    out.T = -cfg.alpha * (a_h0inv * a.transpose());
    return out;
}

double kt_identity_deviation(const FiberConfig& cfg, const BasisIndex& basis, std::size_t dense_cap) {
    const auto kt = assemble_KT(cfg, basis, dense_cap);
    Eigen::MatrixXd h_plus_one = assemble_fiber(cfg, basis).to_dense();
    h_plus_one.diagonal().array() += 1.0;
    return (kt.K + kt.T - h_plus_one).cwiseAbs().maxCoeff();
}

SparseOperator sign_flip(const SparseOperator& op, const BasisIndex& basis) {
    if (op.dimension() != basis.dimension()) throw std::invalid_argument("sign_flip: dimension mismatch");
    return op.transformed([&basis](std::size_t r, std::size_t c, double v) {
        return ((basis.number(r) + basis.number(c)) % 2 == 0) ? v : -v;
    });
}

namespace {

// Largest eigenvalue of the PSD map x -> gram(x) by power iteration, seeded
// with a positive vector (the maps used here are entrywise non-negative).
double power_iteration(Eigen::Index n, const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& gram,
                       const NormOptions& opts) {
    if (n == 0) return 0.0;
    Eigen::VectorXd x = seeded_vector(n, opts.seed, 0.5, 1.5);
    x.normalize();
    double rho_prev = -1.0;
    double residual = 0.0;
    for (int it = 0; it < opts.max_iterations; ++it) {
        Eigen::VectorXd y = gram(x);
        const double rho = x.dot(y);
        const double ynorm = y.norm();
        if (ynorm == 0.0) return 0.0;
        residual = (y - rho * x).norm();
        if (rho_prev >= 0.0 && std::abs(rho - rho_prev) <= opts.tol * rho && residual <= 1e-4 * rho)
            return rho;
        rho_prev = rho;
        x = y / ynorm;
    }
    throw ConvergenceError("power iteration did not converge in " + std::to_string(opts.max_iterations) +
                               " iterations",
                           residual);
}

}  // namespace

double operator_norm(const RealSparse& x, const NormOptions& opts) {
    const RealSparse xt = x.transpose();
    auto gram = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
        Eigen::VectorXd w = x * v;
        return xt * w;
    };
    return std::sqrt(power_iteration(x.cols(), gram, opts));
}

double weighted_annihilation_norm(const FiberConfig& cfg, const BasisIndex& basis, double free_power,
                                  double number_power, const NormOptions& opts) {
    RealSparse a = assemble_annihilation(cfg, basis, true);
    const Eigen::VectorXd h0 = free_diagonal(cfg, basis);
    Eigen::VectorXd weight(h0.size());
    for (Eigen::Index i = 0; i < h0.size(); ++i)
        weight[i] = std::pow(h0[i], free_power) *
                    std::pow(static_cast<double>(basis.number(static_cast<std::size_t>(i))) + 1.0, number_power);
    a = a * weight.asDiagonal();
    return operator_norm(a, opts);
}

std::vector<double> neumann_norms(const FiberConfig& cfg, const BasisIndex& basis, int j_max,
                                  const NormOptions& opts) {
    if (j_max < 1) throw std::invalid_argument("neumann_norms: j_max must be >= 1");
    cfg.validate(basis);
    require_dense(basis.dimension(), opts.dense_cap, "neumann_norms");
    const RealSparse x = assemble_annihilation(cfg, basis, true) * free_diagonal(cfg, basis).cwiseInverse().asDiagonal();
    const RealSparse xt = x.transpose();

    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(j_max));
    for (int j = 1; j <= j_max; ++j) {
        auto gram = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
            Eigen::VectorXd w = v;
            for (int p = 0; p < j; ++p) w = x * w;
            for (int p = 0; p < j; ++p) w = xt * w;
            return w;
        };
        out.push_back(std::sqrt(power_iteration(x.cols(), gram, opts)));
    }
    return out;
}

}  // namespace polaron
