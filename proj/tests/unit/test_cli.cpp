// Copyright 2026 The polaron-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "polaron/cli.hpp"

using namespace polaron;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "polaron_cli_test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

int run(std::vector<std::string> args, std::string* log_text = nullptr) {
    args.insert(args.begin(), "polaron");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream log;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), log);
    if (log_text) *log_text = log.str();
    return code;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream is(slurp(p));
    std::string line;
    while (std::getline(is, line)) {
        std::vector<std::string> row;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(cell);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

TEST_CASE("format_double round-trips") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.123456789}) CHECK(std::stod(format_double(v)) == v);
    CHECK(format_double(0.25) == "0.25");
}

TEST_CASE("invalid spacing exits 3 and names delta") {
    const auto out = scratch("bad_delta");
    std::string log;
    CHECK(run({"dispersion", "--delta", "0", "--out", out.string()}, &log) == kExitConfig);
    CHECK(log.find("delta") != std::string::npos);
    CHECK(run({"dispersion", "--delta", "-1", "--out", out.string()}) == kExitConfig);
}

TEST_CASE("parse failures and unknown subcommands exit 3") {
    CHECK(run({"dispersion", "--no_such_option", "1"}) == kExitConfig);
    CHECK(run({}) == kExitConfig);
    CHECK(run({"dispersion", "--nmax", "two"}) == kExitConfig);
}

TEST_CASE("free dispersion run") {
    const auto out = scratch("free");
    std::string log;
    const int code = run({"dispersion", "--alpha", "0", "--delta", "0.5", "--lambda", "3", "--nmax", "1", "--p_samples",
                          "0,0.5,1,1.5,2", "--out", out.string()},
                         &log);
    CHECK(code == kExitPass);
    const auto rows = read_csv(out / "dispersion.csv");
    REQUIRE(rows.size() == 6);
    CHECK(rows[0] == std::vector<std::string>{"alpha", "Px", "Py", "Pz", "Pnorm", "Lambda", "delta", "Nmax", "energy",
                                              "residual", "iterations"});
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double p = std::stod(rows[i][4]);
        CHECK(std::abs(std::stod(rows[i][8]) - std::min(p * p, 1.0)) <= 1e-9);
    }
    const auto verdict = nlohmann::json::parse(slurp(out / "verdict.json"));
    CHECK(verdict["minimum_check"]["pass"] == true);
    CHECK(verdict["effective_mass"]["M_eff"].get<double>() == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(slurp(out / "dispersion.csv").find('\r') == std::string::npos);
}

TEST_CASE("config file with command-line overrides") {
    const auto dir = scratch("config");
    const auto cfg_path = dir / "run.cfg";
    {
        std::ofstream os(cfg_path);
        os << "# free electron\nalpha = 0\ndelta = 1\nlambda = 2\nnmax = 1\np_samples = 0,0.5\n";
        os << "out = " << (dir / "a").string() << "\n";
    }
    CHECK(run({"dispersion", "--config", cfg_path.string()}) == kExitPass);
    auto rows = read_csv(dir / "a" / "dispersion.csv");
    REQUIRE(rows.size() == 3);
    CHECK(rows[1][0] == "0");
    CHECK(rows[1][6] == "1");

    CHECK(run({"dispersion", "--config", cfg_path.string(), "--alpha", "0.5", "--out", (dir / "b").string()}) ==
          kExitPass);
    rows = read_csv(dir / "b" / "dispersion.csv");
    CHECK(rows[1][0] == "0.5");

    CHECK(run({"dispersion", "--config", (dir / "missing.cfg").string()}) == kExitConfig);
}

TEST_CASE("solver budget exhaustion exits 2") {
    const auto out = scratch("budget");
    std::string log;
    CHECK(run({"dispersion", "--alpha", "1", "--delta", "1", "--lambda", "2", "--nmax", "2", "--max_matvecs", "3",
               "--out", out.string()},
              &log) == kExitNumerical);
    CHECK(log.find("P = (") != std::string::npos);
}

TEST_CASE("capacity limits exit 3") {
    const auto out = scratch("capacity");
    CHECK(run({"dispersion", "--delta", "0.5", "--lambda", "3", "--nmax", "2", "--max_dim", "1000", "--out",
               out.string()}) == kExitConfig);
}

TEST_CASE("kernel command") {
    const auto out = scratch("kernel");
    CHECK(run({"kernel", "--ell", "50", "--x", "0,0,0", "--x_prime", "1,0,0", "--image_cut", "2", "--out",
               out.string()}) == kExitPass);
    const auto j = nlohmann::json::parse(slurp(out / "kernel.json"));
    CHECK(std::abs(j["value"].get<double>() - std::exp(-1.0) / (16.0 * std::atan(1.0))) <= 1e-10);
    CHECK(read_csv(out / "kernel.csv").size() == 3);
    CHECK(run({"kernel", "--x", "1,1,1", "--x_prime", "1,1,1", "--out", out.string()}) == kExitConfig);
}

TEST_CASE("torus command with an explicit fiber pair") {
    const auto out = scratch("torus");
    CHECK(run({"torus", "--alpha", "1", "--delta", "1", "--lambda", "1.5", "--nmax", "2", "--fibers", "0,0,1;0,0,-1",
               "--out", out.string()}) == kExitPass);
    const auto j = nlohmann::json::parse(slurp(out / "torus.json"));
    CHECK(j["report"]["multiplicity"] == 2);
    CHECK(run({"torus", "--fibers", "0,0,1", "--out", out.string()}) == kExitConfig);
    CHECK(run({"torus", "--fibers", "0,x,1;0,0,-1", "--out", out.string()}) == kExitConfig);
}

TEST_CASE("checks are byte-identical across runs") {
    const std::vector<std::string> common{"checks",   "--alpha",     "1",         "--delta",        "0.5",
                                          "--lambda", "3",           "--nmax",    "1",              "--p_far",
                                          "2.5",      "--schedule",  "1.5,2,2.5", "--fiber_cutoff", "1",
                                          "--threads", "3"};
    const auto a = scratch("det_a");
    const auto b = scratch("det_b");
    auto args_a = common, args_b = common;
    args_a.insert(args_a.end(), {"--out", a.string()});
    args_b.insert(args_b.end(), {"--out", b.string()});
    const int ca = run(args_a);
    const int cb = run(args_b);
    CHECK(ca == kExitPass);
    CHECK(cb == kExitPass);
    const auto text = slurp(a / "checks.json");
    CHECK(!text.empty());
    CHECK(text == slurp(b / "checks.json"));
    const auto j = nlohmann::json::parse(text);
    CHECK(j["pass"] == true);
    for (const auto& entry : j["checks"]) CHECK(entry["pass"] == true);
}

TEST_CASE("free checks record the positivity audit as informational") {
    const auto out = scratch("free_checks");
    run({"checks", "--alpha", "0", "--delta", "1", "--lambda", "2", "--nmax", "1", "--p_far", "2", "--schedule",
         "1.5,2,2.5", "--fiber_cutoff", "1", "--out", out.string()});
    const auto j = nlohmann::json::parse(slurp(out / "checks.json"));
    bool seen = false;
    for (const auto& entry : j["checks"]) {
        if (entry["name"] != "positivity_audit") continue;
        seen = true;
        CHECK(entry["gated"] == false);
        CHECK(entry["note"] == "not improving (decoupled)");
    }
    CHECK(seen);
}
