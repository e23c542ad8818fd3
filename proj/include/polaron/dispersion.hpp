// Copyright 2026 The polaron-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "polaron/eigensolver.hpp"
#include "polaron/fock_basis.hpp"
#include "polaron/mode_grid.hpp"
#include "polaron/types.hpp"

namespace polaron {

struct GridParams {
    double spacing = 0.75;
    double cutoff = 3.0;
};

struct SolverSettings {
    double tol = 1e-9;
    std::uint64_t seed = 42;
    int threads = 1;
    int max_matvecs = 50000;
    std::size_t max_dimension = BasisIndex::kDefaultMaxDimension;
    std::size_t max_modes = ModeGrid::kDefaultMaxModes;

    LanczosOptions lanczos() const { return {tol, seed, max_matvecs, 0}; }
};

/// Grid and basis shared by every fiber solve of one configuration.
struct FiberSpace {
    std::shared_ptr<const ModeGrid> grid;
    std::shared_ptr<const BasisIndex> basis;
    int n_max = 0;

    static FiberSpace build(const GridParams& grid, int n_max, const SolverSettings& settings = {});
};

/// Converged ground energy of H(P) on a prepared space. Convergence failures
/// are rethrown with P in the message.
SpectralResult solve_fiber(const FiberSpace& space, double alpha, const Vec3& momentum,
                           const SolverSettings& settings);

struct DispersionSample {
    Vec3 momentum;
    double momentum_norm;
    double energy;
    double residual;
    int iterations;
};

struct DispersionCurve {
    double alpha = 0.0;
    GridParams grid;
    int n_max = 0;
    std::vector<DispersionSample> samples;  ///< sorted by |P|, ties in input order
};

DispersionCurve dispersion_curve(double alpha, const std::vector<Vec3>& momenta, const GridParams& grid, int n_max,
                                 const SolverSettings& settings = {});

/// (0, 0, t) for every t.
std::vector<Vec3> along_z(const std::vector<double>& ts);

struct MassReport {
    double effective_mass = 0.0;
    double step = 0.0;
    double energy_zero = 0.0;
    double energy_plus = 0.0;
    double energy_minus = 0.0;
    double curvature = 0.0;  ///< central second difference
    bool positive_curvature = false;
};

MassReport effective_mass(double alpha, const GridParams& grid, int n_max, double step,
                          const SolverSettings& settings = {});

struct MinimumVerdict {
    bool pass = false;
    double margin = 0.0;
    double worst_margin = 0.0;  ///< min over P != 0 of E(P) - E(0)
    Vec3 argmin{0.0, 0.0, 0.0};
    bool argmin_unique = false;  ///< no other sample within `margin` of the minimum
    double energy_zero = 0.0;
};

/// Passes iff E(0) + margin < E(P) for every sampled P != 0. The curve must
/// contain P = 0 and at least one other sample.
MinimumVerdict minimum_check(const DispersionCurve& curve, double margin);

struct HvzReport {
    Vec3 far_momentum{0.0, 0.0, 0.0};
    double energy_zero = 0.0;
    double energy_far = 0.0;
    double distance = 0.0;  ///< E(P_far) - (E(0) + 1)
    double edge_tol = 0.1;
    double dressing_deficit = 0.0;  ///< E_{n_max-1}(0) - E_{n_max}(0); 0 when n_max = 0
    bool pass = false;
};

/// Requires |P_far| >= 2 and cutoff >= |P_far|.
HvzReport hvz_edge_check(double alpha, const GridParams& grid, int n_max, const Vec3& far_momentum,
                         double edge_tol = 0.1, const SolverSettings& settings = {});

struct ExtrapolationPoint {
    double cutoff;
    double energy;
    double residual;
    int iterations;
    std::size_t modes;
    std::size_t dimension;
};

struct ExtrapolationReport {
    std::vector<ExtrapolationPoint> points;
    double energy_limit = 0.0;  ///< E_inf of E = E_inf + c / Lambda
    double slope = 0.0;         ///< c
    double fit_residual = 0.0;  ///< max |E - fit|
    bool monotone = false;      ///< E non-increasing in Lambda within 1e-10
};

/// Least-squares fit of E(Lambda) = E_inf + c / Lambda at momentum P.
/// Needs at least three cutoffs.
ExtrapolationReport cutoff_extrapolate(double alpha, const CutoffSchedule& schedule, const Vec3& momentum,
                                       const SolverSettings& settings = {});

/// Two-parameter least squares of y = a + b x; returns {a, b, max |residual|}.
std::array<double, 3> fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace polaron
