// Copyright 2026 The polaron-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "polaron/dispersion.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "polaron/operator_assembly.hpp"
#include "polaron/parallel.hpp"

namespace polaron {

namespace {

std::string describe(const Vec3& p) {
    std::ostringstream os;
    os.precision(17);
    os << "P = (" << p[0] << ", " << p[1] << ", " << p[2] << ")";
    return os.str();
}

}  // namespace

FiberSpace FiberSpace::build(const GridParams& grid, int n_max, const SolverSettings& settings) {
    if (n_max < 0) throw std::invalid_argument("n_max must be >= 0");
    FiberSpace s;
    auto g = std::make_shared<ModeGrid>(ModeGrid::build(grid.spacing, grid.cutoff, settings.max_modes));
    s.basis = std::make_shared<BasisIndex>(basis_for(*g, n_max, settings.max_dimension));
    s.grid = std::move(g);
    s.n_max = n_max;
    return s;
}

SpectralResult solve_fiber(const FiberSpace& space, double alpha, const Vec3& momentum,
                           const SolverSettings& settings) {
    FiberConfig cfg{alpha, momentum, space.grid, space.n_max};
    const SparseOperator h = assemble_fiber(cfg, *space.basis);
    try {
        return ground_state(h, settings.lanczos());
    } catch (const ConvergenceError& e) {
        throw ConvergenceError(std::string(e.what()) + " at " + describe(momentum), e.residual());
    }
}

std::vector<Vec3> along_z(const std::vector<double>& ts) {
    std::vector<Vec3> out;
    out.reserve(ts.size());
    for (double t : ts) out.push_back({0.0, 0.0, t});
    return out;
}

DispersionCurve dispersion_curve(double alpha, const std::vector<Vec3>& momenta, const GridParams& grid, int n_max,
                                 const SolverSettings& settings) {
    if (!(alpha >= 0.0)) throw std::invalid_argument("dispersion_curve: alpha must be >= 0");
    const FiberSpace space = FiberSpace::build(grid, n_max, settings);

    std::vector<DispersionSample> samples(momenta.size());
    parallel_for(momenta.size(), settings.threads, [&](std::size_t i) {
        const auto res = solve_fiber(space, alpha, momenta[i], settings);
        samples[i] = {momenta[i], norm(momenta[i]), res.energy, res.residual, res.iterations};
    });
    std::stable_sort(samples.begin(), samples.end(),
                     [](const DispersionSample& a, const DispersionSample& b) { return a.momentum_norm < b.momentum_norm; });
    return {alpha, grid, n_max, std::move(samples)};
}

MassReport effective_mass(double alpha, const GridParams& grid, int n_max, double step,
                          const SolverSettings& settings) {
    if (!(step > 0.0) || !(step < 1.0)) throw std::invalid_argument("effective_mass: step h must lie in (0, 1)");
    const FiberSpace space = FiberSpace::build(grid, n_max, settings);
    const std::vector<Vec3> points{{0.0, 0.0, 0.0}, {0.0, 0.0, step}, {0.0, 0.0, -step}};
    std::array<double, 3> e{};
    parallel_for(3, settings.threads,
                 [&](std::size_t i) { e[i] = solve_fiber(space, alpha, points[i], settings).energy; });

    MassReport rep;
    rep.step = step;
    rep.energy_zero = e[0];
    rep.energy_plus = e[1];
    rep.energy_minus = e[2];
    rep.curvature = (e[1] + e[2] - 2.0 * e[0]) / (step * step);
    rep.positive_curvature = rep.curvature > 0.0 && std::isfinite(rep.curvature);
    rep.effective_mass = rep.positive_curvature ? 1.0 / rep.curvature : std::numeric_limits<double>::quiet_NaN();
    return rep;
}

MinimumVerdict minimum_check(const DispersionCurve& curve, double margin) {
    const auto zero = std::find_if(curve.samples.begin(), curve.samples.end(),
                                   [](const DispersionSample& s) { return s.momentum_norm == 0.0; });
    if (zero == curve.samples.end()) throw std::invalid_argument("minimum_check: curve has no P = 0 sample");
    if (curve.samples.size() < 2) throw std::invalid_argument("minimum_check: need a sample with P != 0");

    MinimumVerdict v;
    v.margin = margin;
    v.energy_zero = zero->energy;
    v.worst_margin = std::numeric_limits<double>::infinity();
    double lowest = std::numeric_limits<double>::infinity();
    for (const auto& s : curve.samples) {
        if (s.energy < lowest) {
            lowest = s.energy;
            v.argmin = s.momentum;
        }
        if (&s != &*zero) v.worst_margin = std::min(v.worst_margin, s.energy - zero->energy);
    }
    const auto near_min = std::count_if(curve.samples.begin(), curve.samples.end(),
                                        [&](const DispersionSample& s) { return s.energy <= lowest + margin; });
    v.argmin_unique = near_min == 1;
    v.pass = v.worst_margin > margin;
    return v;
}

HvzReport hvz_edge_check(double alpha, const GridParams& grid, int n_max, const Vec3& far_momentum,
                         double edge_tol, const SolverSettings& settings) {
    const double pn = norm(far_momentum);
    if (pn < 2.0) throw std::invalid_argument("hvz_edge_check: |P_far| must be >= 2");
    if (grid.cutoff < pn)
        throw std::invalid_argument("hvz_edge_check: cutoff Lambda below |P_far|; no mode can carry P_far");

    const FiberSpace space = FiberSpace::build(grid, n_max, settings);
    HvzReport rep;
    rep.far_momentum = far_momentum;
    rep.edge_tol = edge_tol;
    std::array<double, 2> e{};
    const std::array<Vec3, 2> points{Vec3{0.0, 0.0, 0.0}, far_momentum};
    parallel_for(2, settings.threads,
                 [&](std::size_t i) { e[i] = solve_fiber(space, alpha, points[i], settings).energy; });
    rep.energy_zero = e[0];
    rep.energy_far = e[1];
    rep.distance = rep.energy_far - (rep.energy_zero + 1.0);
    if (n_max > 0) {
        FiberSpace smaller;
        smaller.grid = space.grid;
        smaller.n_max = n_max - 1;
        smaller.basis = std::make_shared<BasisIndex>(basis_for(*space.grid, n_max - 1, settings.max_dimension));
        rep.dressing_deficit = solve_fiber(smaller, alpha, points[0], settings).energy - rep.energy_zero;
    }
    rep.pass = rep.distance >= 0.0 && rep.distance <= edge_tol;
    return rep;
}

std::array<double, 3> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need >= 2 paired points");
    const auto n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_line: abscissae are all equal");
    const double b = sxy / sxx;
    const double a = my - b * mx;
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(y[i] - (a + b * x[i])));
    return {a, b, worst};
}

ExtrapolationReport cutoff_extrapolate(double alpha, const CutoffSchedule& schedule, const Vec3& momentum,
                                       const SolverSettings& settings) {
    const auto& cutoffs = schedule.cutoffs();
    if (cutoffs.size() < 3) throw std::invalid_argument("cutoff_extrapolate: schedule needs at least 3 cutoffs");

    ExtrapolationReport rep;
    rep.points.resize(cutoffs.size());
    parallel_for(cutoffs.size(), settings.threads, [&](std::size_t i) {
        const FiberSpace space = FiberSpace::build({schedule.spacing(), cutoffs[i]}, schedule.n_max(), settings);
        const auto res = solve_fiber(space, alpha, momentum, settings);
        rep.points[i] = {cutoffs[i], res.energy, res.residual, res.iterations, space.grid->size(),
                         space.basis->dimension()};
    });

    std::vector<double> inv, e;
    rep.monotone = true;
    for (std::size_t i = 0; i < rep.points.size(); ++i) {
        inv.push_back(1.0 / rep.points[i].cutoff);
        e.push_back(rep.points[i].energy);
        if (i > 0 && rep.points[i].energy > rep.points[i - 1].energy + 1e-10) rep.monotone = false;
    }
    const auto [a, b, worst] = fit_line(inv, e);
    rep.energy_limit = a;
    rep.slope = b;
    rep.fit_residual = worst;
    return rep;
}

}  // namespace polaron
