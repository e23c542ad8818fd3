// Copyright 2026 The polaron-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "polaron/dispersion.hpp"
#include "polaron/eigensolver.hpp"
#include "polaron/operator_assembly.hpp"

using namespace polaron;

TEST_CASE("free dispersion is min{P^2, 1}") {
    const auto curve = dispersion_curve(0.0, along_z({2.0, 0.0, 1.0, 0.5, -0.5}), {0.5, 3.0}, 1);
    REQUIRE(curve.samples.size() == 5);
    for (std::size_t i = 1; i < curve.samples.size(); ++i)
        CHECK(curve.samples[i - 1].momentum_norm <= curve.samples[i].momentum_norm);
    for (const auto& s : curve.samples) {
        CHECK(std::abs(s.energy - std::min(s.momentum_norm * s.momentum_norm, 1.0)) <= 1e-9);
        CHECK(s.residual <= 1e-9);
    }
    // Equal |P| keeps input order, and E(P) = E(-P).
    CHECK(curve.samples[1].momentum[2] == 0.5);
    CHECK(curve.samples[2].momentum[2] == -0.5);
    CHECK(curve.samples[1].energy == curve.samples[2].energy);
}

TEST_CASE("dispersion samples match a dense oracle at alpha > 0") {
    const GridParams gp{1.0, 1.5};
    const auto curve = dispersion_curve(1.0, along_z({0.0, 0.7, 1.4}), gp, 2);
    const auto space = FiberSpace::build(gp, 2);
    for (const auto& s : curve.samples) {
        const auto op = assemble_fiber({1.0, s.momentum, space.grid, 2}, *space.basis);
        CHECK(std::abs(s.energy - dense_spectrum(op, 1)[0]) <= 1e-8);
    }
}

TEST_CASE("threads do not change results") {
    const GridParams gp{1.0, 2.0};
    SolverSettings one, four;
    four.threads = 4;
    const auto a = dispersion_curve(1.0, along_z({0.0, 0.5, 1.0, 1.5}), gp, 2, one);
    const auto b = dispersion_curve(1.0, along_z({0.0, 0.5, 1.0, 1.5}), gp, 2, four);
    for (std::size_t i = 0; i < a.samples.size(); ++i) CHECK(a.samples[i].energy == b.samples[i].energy);
}

TEST_CASE("effective mass") {
    const auto free = effective_mass(0.0, {0.5, 3.0}, 1, 0.1);
    CHECK(free.effective_mass == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(free.positive_curvature);
    const auto half = effective_mass(0.0, {0.5, 3.0}, 1, 0.05);
    CHECK(std::abs(half.effective_mass - free.effective_mass) <= 1e-6);

    const auto dressed = effective_mass(1.0, {1.0, 2.0}, 2, 0.1);
    CHECK(dressed.positive_curvature);
    CHECK(dressed.effective_mass > 0.5);

    CHECK_THROWS_AS(effective_mass(0.0, {0.5, 3.0}, 1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(effective_mass(0.0, {0.5, 3.0}, 1, 1.0), std::invalid_argument);
}

TEST_CASE("minimum check") {
    const auto curve = dispersion_curve(0.0, along_z({0.0, 0.5, 1.0, 2.0}), {0.5, 3.0}, 1);
    const auto v = minimum_check(curve, 1e-4);
    CHECK(v.pass);
    CHECK(v.worst_margin == doctest::Approx(0.25).epsilon(1e-8));
    CHECK(v.argmin == Vec3{0, 0, 0});
    CHECK(v.argmin_unique);

    DispersionCurve flat;
    for (double t : {0.0, 1.0, 2.0}) flat.samples.push_back({{0, 0, t}, t, -1.0, 0.0, 1});
    const auto f = minimum_check(flat, 1e-4);
    CHECK_FALSE(f.pass);
    CHECK_FALSE(f.argmin_unique);

    DispersionCurve no_zero;
    no_zero.samples.push_back({{0, 0, 1}, 1.0, 0.0, 0.0, 1});
    CHECK_THROWS_AS(minimum_check(no_zero, 1e-4), std::invalid_argument);
}

TEST_CASE("dressed minimum sits at P = 0") {
    const auto curve = dispersion_curve(1.0, along_z({0.0, 0.5, 1.0, 1.5, 2.0}), {1.0, 2.0}, 2);
    CHECK(minimum_check(curve, 1e-4).pass);
}

TEST_CASE("HVZ edge") {
    const auto free = hvz_edge_check(0.0, {1.0, 3.0}, 1, {0, 0, 2});
    CHECK(std::abs(free.distance) <= 1e-9);
    CHECK(free.pass);
    CHECK(std::abs(free.dressing_deficit) <= 1e-12);

    const auto dressed = hvz_edge_check(1.0, {1.0, 2.0}, 2, {0, 0, 2});
    // Truncation can push E(P_far) either side of the edge; only the size is bounded.
    CHECK(std::abs(dressed.distance) <= dressed.edge_tol);
    CHECK(dressed.dressing_deficit >= 0.0);
    CHECK(dressed.pass == (dressed.distance >= 0.0 && dressed.distance <= dressed.edge_tol));

    CHECK_THROWS_AS(hvz_edge_check(1.0, {1.0, 2.0}, 1, {0, 0, 2.5}), std::invalid_argument);
    CHECK_THROWS_AS(hvz_edge_check(1.0, {1.0, 3.0}, 1, {0, 0, 1.5}), std::invalid_argument);
}

TEST_CASE("fit_line") {
    const auto [a, b, r] = fit_line({0.0, 1.0, 2.0, 3.0}, {1.0, 3.0, 5.0, 7.0});
    CHECK(a == doctest::Approx(1.0));
    CHECK(b == doctest::Approx(2.0));
    CHECK(r <= 1e-14);
    const auto noisy = fit_line({0.0, 1.0, 2.0}, {0.0, 1.0, 0.0});
    CHECK(noisy[0] == doctest::Approx(1.0 / 3.0));
    CHECK(noisy[1] == doctest::Approx(0.0));
    CHECK(noisy[2] == doctest::Approx(2.0 / 3.0));
    CHECK_THROWS_AS(fit_line({1.0}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(fit_line({1.0, 1.0}, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("cutoff extrapolation") {
    const auto free = cutoff_extrapolate(0.0, CutoffSchedule({1.0, 1.5, 2.0}, 0.5, 1), {0, 0, 0.5});
    CHECK(std::abs(free.slope) <= 1e-9);
    CHECK(free.energy_limit == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(free.monotone);

    const auto dressed = cutoff_extrapolate(0.5, CutoffSchedule({1.0, 1.5, 2.0, 2.5}, 0.5, 1), {0, 0, 0});
    CHECK(dressed.monotone);
    for (std::size_t i = 1; i < dressed.points.size(); ++i) {
        CHECK(dressed.points[i].energy <= dressed.points[i - 1].energy + 1e-10);
        CHECK(dressed.points[i].modes > dressed.points[i - 1].modes);
    }
    CHECK(dressed.energy_limit < dressed.points.back().energy);

    CHECK_THROWS_AS(cutoff_extrapolate(0.5, CutoffSchedule({1.0, 2.0}, 0.5, 1), {0, 0, 0}), std::invalid_argument);
}

TEST_CASE("octahedral invariance of E(P)") {
    const auto space = FiberSpace::build({1.0, 1.5}, 2);
    const Vec3 p{0.3, -0.5, 0.9};
    const double ref = solve_fiber(space, 1.0, p, {}).energy;
    const std::vector<Vec3> images{{0.5, 0.3, 0.9}, {-0.9, 0.3, 0.5}, {0.3, 0.5, -0.9}, {-0.3, 0.5, -0.9}};
    for (const auto& q : images) CHECK(std::abs(solve_fiber(space, 1.0, q, {}).energy - ref) <= 1e-9);
}

TEST_CASE("convergence failures identify the momentum") {
    SolverSettings s;
    s.max_matvecs = 3;
    const auto space = FiberSpace::build({1.0, 2.0}, 2);
    try {
        solve_fiber(space, 1.0, {0, 0, 0.5}, s);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(std::string(e.what()).find("P = (0, 0, 0.5)") != std::string::npos);
    }
}
