// Copyright 2026 The polaron-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "polaron/torus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "polaron/operator_assembly.hpp"
#include "polaron/parallel.hpp"

namespace polaron {

double TorusConfig::lattice_step() const { return 2.0 * std::numbers::pi / ell; }

std::vector<IVec3> TorusConfig::fiber_lattice() const {
    if (!(ell > 0.0) || !std::isfinite(ell)) throw std::invalid_argument("torus: ell must be positive");
    if (fibers) {
        if (fibers->empty()) throw std::invalid_argument("torus: explicit fiber list is empty");
        for (const auto& f : *fibers)
            if (std::find(fibers->begin(), fibers->end(), -f) == fibers->end())
                throw std::invalid_argument("torus: explicit fiber list is not closed under P -> -P");
        return *fibers;
    }
    if (!(fiber_cutoff >= 0.0)) throw std::invalid_argument("torus: fiber_cutoff must be >= 0");
    const double ratio = fiber_cutoff / lattice_step();
    const double limit2 = ratio * ratio * (1.0 + 1e-12);
    const auto reach = static_cast<std::int64_t>(std::floor(ratio * (1.0 + 1e-12)));
    std::vector<IVec3> out;
    for (std::int64_t x = -reach; x <= reach; ++x)
        for (std::int64_t y = -reach; y <= reach; ++y)
            for (std::int64_t z = -reach; z <= reach; ++z)
                if (static_cast<double>(norm2(IVec3{x, y, z})) <= limit2) out.push_back({x, y, z});
    return out;
}

SparseOperator TorusModel::assembled() const {
    const std::size_t block = space.basis->dimension();
    std::vector<Entry> all;
    for (std::size_t b = 0; b < blocks.size(); ++b)
        for (auto e : blocks[b].entries()) all.push_back({e.row + b * block, e.col + b * block, e.value});
    return SparseOperator(dimension(), all);
}

TorusModel assemble_torus(const TorusConfig& cfg, const SolverSettings& settings) {
    TorusModel model;
    model.config = cfg;
    model.fibers = cfg.fiber_lattice();
    model.space = FiberSpace::build(cfg.grid, cfg.n_max, settings);
    const std::size_t total = model.fibers.size() * model.space.basis->dimension();
    if (total > settings.max_dimension)
        throw CapacityError("torus: " + std::to_string(model.fibers.size()) + " fibers x dimension " +
                            std::to_string(model.space.basis->dimension()) + " exceeds limit " +
                            std::to_string(settings.max_dimension));
    model.blocks.resize(model.fibers.size());
    parallel_for(model.fibers.size(), settings.threads, [&](std::size_t i) {
        FiberConfig fc{cfg.alpha, model.fiber_momentum(i), model.space.grid, cfg.n_max};
        model.blocks[i] = assemble_fiber(fc, *model.space.basis);
    });
    return model;
}

TorusReport degeneracy_analysis(const TorusModel& model, double degeneracy_tol, const SolverSettings& settings) {
    TorusReport rep;
    rep.degeneracy_tol = degeneracy_tol;
    const std::size_t dim = model.space.basis->dimension();
    const int first = static_cast<int>(std::min<std::size_t>(2, dim));

    auto levels = [&](std::size_t i, int count) {
        auto pairs = lowest_eigenpairs(model.blocks[i], count, settings.lanczos());
        FiberLevels fl{model.fibers[i], model.fiber_momentum(i), {}, 0.0};
        for (const auto& p : pairs) {
            fl.energies.push_back(p.energy);
            fl.residual = std::max(fl.residual, p.residual);
        }
        return fl;
    };

    rep.fibers.resize(model.blocks.size());
    parallel_for(model.blocks.size(), settings.threads, [&](std::size_t i) { rep.fibers[i] = levels(i, first); });

    double lowest = std::numeric_limits<double>::infinity();
    for (const auto& f : rep.fibers) lowest = std::min(lowest, f.energies.front());
    const double ceiling = lowest + degeneracy_tol;

    // A fiber whose computed levels all sit in the ground cluster may hide more.
    for (std::size_t i = 0; i < rep.fibers.size(); ++i) {
        auto count = static_cast<int>(rep.fibers[i].energies.size());
        while (rep.fibers[i].energies.back() <= ceiling && static_cast<std::size_t>(count) < dim) {
            count = static_cast<int>(std::min<std::size_t>(dim, static_cast<std::size_t>(count) + 2));
            rep.fibers[i] = levels(i, count);
        }
    }

    rep.ground_energy = lowest;
    rep.gap = std::numeric_limits<double>::infinity();
    for (const auto& f : rep.fibers) {
        if (f.energies.front() <= ceiling) rep.argmin.push_back(f.fiber);
        for (double e : f.energies) {
            if (e <= ceiling)
                ++rep.multiplicity;
            else
                rep.gap = std::min(rep.gap, e - lowest);
        }
    }

    const IVec3 origin{0, 0, 0};
    const bool has_origin = std::find(rep.argmin.begin(), rep.argmin.end(), origin) != rep.argmin.end();
    rep.argmin_is_origin = has_origin && rep.argmin.size() == 1;
    rep.mechanism_consistent = (has_origin || rep.multiplicity >= 2) &&
                               (!rep.argmin_is_origin || (rep.multiplicity == 1 && rep.gap > degeneracy_tol));
    return rep;
}

KernelValue periodized_yukawa(const Vec3& x, const Vec3& x_prime, double ell, double mass, int image_cut) {
    if (!(ell > 0.0)) throw std::invalid_argument("periodized_yukawa: ell must be positive");
    if (!(mass > 0.0)) throw std::invalid_argument("periodized_yukawa: mass must be positive");
    if (image_cut < 1) throw std::invalid_argument("periodized_yukawa: image_cut must be >= 1");

    Vec3 d = x - x_prime;
    // The image lattice is symmetric, so K(d) = K(-d); fix a sign so the
    // summation order, and hence the rounding, is the same both ways.
    for (double c : d) {
        if (c == 0.0) continue;
        if (c < 0.0) d = -1.0 * d;
        break;
    }
    bool coincident = true;
    for (double c : d) {
        const double frac = c / ell - std::round(c / ell);
        coincident &= std::abs(frac) <= 1e-14;
    }
    if (coincident) throw std::domain_error("periodized_yukawa: x and x' coincide modulo the torus lattice");

    KernelValue out;
    double shell = 0.0;
    for (int a = -image_cut; a <= image_cut; ++a) {
        for (int b = -image_cut; b <= image_cut; ++b) {
            for (int c = -image_cut; c <= image_cut; ++c) {
                const Vec3 r{d[0] - a * ell, d[1] - b * ell, d[2] - c * ell};
                const double dist = norm(r);
                const double term = std::exp(-mass * dist) / (4.0 * std::numbers::pi * dist);
                out.value += term;
                if (std::max({std::abs(a), std::abs(b), std::abs(c)}) == image_cut) shell += term;
            }
        }
    }
    out.last_shell_relative = shell / out.value;
    out.converged = out.last_shell_relative < 1e-12;
    return out;
}

}  // namespace polaron
