// Copyright 2026 The polaron-lab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file cli.hpp
 * @brief Command pipelines behind the `polaron` executable.
 *
 * Commands: dispersion, checks, extrapolate, torus, kernel. Each writes its
 * files into RunConfig::out_dir and returns an exit code:
 *   0 all gated checks pass, 1 a check failed, 2 numerical failure,
 *   3 configuration error.
 */

#pragma once

#include <cstdint>
#include <iosfwd>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace polaron {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum ExitCode : int { kExitPass = 0, kExitCheckFailed = 1, kExitNumerical = 2, kExitConfig = 3 };

struct RunConfig {
    std::string command;
    std::string out_dir = "out";

    double alpha = 1.0;
    double delta = 0.75;
    double lambda = 3.0;
    int nmax = 2;
    double tol = 1e-9;
    std::uint64_t seed = 42;
    int threads = 1;
    int max_matvecs = 50000;
    std::size_t dense_cap = 2000;
    std::size_t max_dim = 20'000'000;
    std::size_t max_modes = 5'000'000;

    // dispersion
    std::vector<double> p_samples{0.0, 0.5, 1.0, 1.5, 2.0, 3.0};
    double mass_step = 0.1;
    double margin = 1e-4;

    // checks: HVZ edge
    double p_far = 2.5;
    double edge_tol = 0.1;

    // extrapolate / checks
    std::vector<double> schedule{4.0, 8.0, 12.0, 16.0};
    int extrap_nmax = 1;
    double extrap_p = 0.0;

    // torus / checks
    double ell = 2.0 * std::numbers::pi;
    double fiber_cutoff = 3.0;
    double degeneracy_tol = 1e-7;
    std::string fibers;  ///< "x,y,z;x,y,z" lattice coordinates; empty = ball
    std::vector<int> restricted_q{0, 0, 1};

    // checks: dense operator-level instance
    double dense_delta = 1.0;
    double dense_lambda = 1.5;
    int dense_nmax = 2;
    int neumann_nmax = 3;

    // kernel
    std::vector<double> x{0.0, 0.0, 0.0};
    std::vector<double> x_prime{1.0, 0.0, 0.0};
    double kernel_mass = 1.0;
    int image_cut = 3;

    /// Throws ConfigError naming the offending parameter.
    void validate() const;
};

/// Parses argv (subcommand, --config file, overrides). Returns the exit code
/// for --help or parse failures through `early_exit`, else fills `cfg`.
bool parse_command_line(int argc, const char* const* argv, RunConfig& cfg, int& early_exit);

int cmd_dispersion(const RunConfig& cfg, std::ostream& log);
int cmd_checks(const RunConfig& cfg, std::ostream& log);
int cmd_extrapolate(const RunConfig& cfg, std::ostream& log);
int cmd_torus(const RunConfig& cfg, std::ostream& log);
int cmd_kernel(const RunConfig& cfg, std::ostream& log);

/// Validates, dispatches on cfg.command and maps exceptions to exit codes.
int run_command(const RunConfig& cfg, std::ostream& log);

/// parse_command_line + run_command.
int run_cli(int argc, const char* const* argv, std::ostream& log);

/// "%.17g" formatting used for every CSV number.
std::string format_double(double v);

}  // namespace polaron
