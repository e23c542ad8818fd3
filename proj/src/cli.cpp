// Copyright 2026 The polaron-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "polaron/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "polaron/dispersion.hpp"
#include "polaron/eigensolver.hpp"
#include "polaron/mode_grid.hpp"
#include "polaron/operator_assembly.hpp"
#include "polaron/torus.hpp"

namespace polaron {

using Json = nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------------------
// Output helpers

Json vec_json(const Vec3& v) { return Json::array({v[0], v[1], v[2]}); }
Json ivec_json(const IVec3& v) { return Json::array({v[0], v[1], v[2]}); }

// Non-finite values become null, matching nlohmann's own behavior.
Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::filesystem::path prepare_out(const RunConfig& cfg) {
    std::filesystem::path dir(cfg.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir))
        throw ConfigError("out: cannot create output directory '" + cfg.out_dir + "'");
    return dir;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw ConfigError("out: cannot write " + path.string());
    os << text;
}

void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) {
        for (std::size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << header[i];
        os_ << '\n';
    }
    CsvWriter& field(double v) { return raw(format_double(v)); }
    CsvWriter& field(long long v) { return raw(std::to_string(v)); }
    void end_row() {
        os_ << '\n';
        first_ = true;
    }
    std::string str() const { return os_.str(); }

private:
    CsvWriter& raw(const std::string& s) {
        os_ << (first_ ? "" : ",") << s;
        first_ = false;
        return *this;
    }
    std::ostringstream os_;
    bool first_ = true;
};

SolverSettings settings_of(const RunConfig& cfg) {
    SolverSettings s;
    s.tol = cfg.tol;
    s.seed = cfg.seed;
    s.threads = cfg.threads;
    s.max_matvecs = cfg.max_matvecs;
    s.max_dimension = cfg.max_dim;
    s.max_modes = cfg.max_modes;
    return s;
}

Json physics_json(const RunConfig& cfg) {
    return Json{{"alpha", cfg.alpha}, {"delta", cfg.delta}, {"Lambda", cfg.lambda}, {"Nmax", cfg.nmax},
                {"tol", cfg.tol},     {"seed", cfg.seed}};
}

std::vector<IVec3> parse_fibers(const std::string& text) {
    std::vector<IVec3> out;
    std::stringstream all(text);
    std::string item;
    while (std::getline(all, item, ';')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        std::stringstream one(item);
        std::string tok;
        IVec3 v{};
        int k = 0;
        while (std::getline(one, tok, ',')) {
            if (k == 3) throw ConfigError("fibers: each entry needs exactly three integers");
            try {
                std::size_t used = 0;
                v[static_cast<std::size_t>(k++)] = std::stoll(tok, &used);
                if (tok.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw ConfigError("fibers: '" + tok + "' is not an integer");
            }
        }
        if (k != 3) throw ConfigError("fibers: each entry needs exactly three integers");
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError("fibers: empty fiber list");
    return out;
}

struct CheckEntry {
    std::string name;
    bool gated = true;
    bool pass = false;
    Json measured = Json::object();
    Json threshold = Json::object();
    std::string note;

    Json to_json() const {
        Json j{{"name", name}, {"gated", gated}, {"pass", pass}, {"measured", measured}, {"threshold", threshold}};
        if (!note.empty()) j["note"] = note;
        return j;
    }
};

// ---------------------------------------------------------------------------
// Individual checks

CheckEntry check_kt_identity(const RunConfig& cfg) {
    CheckEntry c;
    c.name = "kt_identity";
    c.threshold = {{"max_deviation", 1e-10}};
    Json instances = Json::array();
    double worst = 0.0;

    auto single = std::make_shared<ModeGrid>(ModeGrid::custom(1.0, {{0, 0, 1}}, {1.0}));
    const auto single_basis = basis_for(*single, 1);
    const double d0 = kt_identity_deviation({1.0, {0, 0, 0}, single, 1}, single_basis, cfg.dense_cap);
    instances.push_back({{"instance", "single_mode_2x2"}, {"alpha", 1.0}, {"dimension", 2}, {"max_deviation", d0}});
    worst = std::max(worst, d0);

    auto grid = std::make_shared<ModeGrid>(ModeGrid::build(cfg.dense_delta, cfg.dense_lambda, cfg.max_modes));
    const auto basis = basis_for(*grid, cfg.dense_nmax, cfg.max_dim);
    std::vector<double> alphas{0.0, 0.5, cfg.alpha};
    std::sort(alphas.begin(), alphas.end());
    alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());
    for (double a : alphas) {
        FiberConfig fc{a, {0.0, 0.0, 0.0}, grid, cfg.dense_nmax};
        const double d = kt_identity_deviation(fc, basis, cfg.dense_cap);
        const auto kt = assemble_KT(fc, basis, cfg.dense_cap);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(kt.K, Eigen::EigenvaluesOnly);
        instances.push_back({{"instance", "dense_grid"},
                             {"alpha", a},
                             {"dimension", basis.dimension()},
                             {"max_deviation", d},
                             {"K_min_eigenvalue", es.eigenvalues()[0]}});
        worst = std::max(worst, d);
    }
    c.measured = {{"max_deviation", worst}, {"instances", instances}};
    c.pass = worst <= 1e-10;
    return c;
}

CheckEntry check_norm_bound(const RunConfig& cfg) {
    CheckEntry c;
    c.name = "norm_bound";
    const double bound = std::sqrt(1.0 / 8.0) * 1.05;
    auto grid = std::make_shared<ModeGrid>(ModeGrid::build(cfg.delta, cfg.lambda, cfg.max_modes));
    const auto basis = basis_for(*grid, cfg.nmax, cfg.max_dim);
    NormOptions opts;
    opts.seed = cfg.seed;
    const double measured =
        weighted_annihilation_norm({1.0, {0.0, 0.0, 0.0}, grid, cfg.nmax}, basis, -0.5, -0.25, opts);
    c.measured = {{"norm", measured}, {"alpha", 1.0}, {"dimension", basis.dimension()}};
    c.threshold = {{"max_norm", bound}};
    c.pass = measured <= bound;
    return c;
}

CheckEntry check_neumann(const RunConfig& cfg) {
    CheckEntry c;
    c.name = "neumann_decay";
    auto grid = std::make_shared<ModeGrid>(ModeGrid::build(cfg.dense_delta, cfg.dense_lambda, cfg.max_modes));
    const auto basis = basis_for(*grid, cfg.neumann_nmax, cfg.max_dim);
    FiberConfig fc{cfg.alpha, {0.0, 0.0, 0.0}, grid, cfg.neumann_nmax};
    NormOptions opts;
    opts.seed = cfg.seed;
    opts.dense_cap = cfg.dense_cap;
    const int j_max = cfg.neumann_nmax + 2;
    const auto s = neumann_norms(fc, basis, j_max, opts);
    const double c_meas = weighted_annihilation_norm(fc, basis, -1.0, 0.25, opts);
    Json rows = Json::array();
    bool ok = true;
    for (int j = 1; j <= j_max; ++j) {
        const double bound = std::pow(c_meas, j) * std::pow(std::tgamma(j + 1.0), -0.25);
        const double sj = s[static_cast<std::size_t>(j - 1)];
        const bool row_ok = (j > cfg.neumann_nmax) ? sj == 0.0 : sj <= bound * (1.0 + 1e-9);
        ok &= row_ok;
        rows.push_back({{"j", j}, {"s_j", sj}, {"bound", bound}, {"pass", row_ok}});
    }
    c.measured = {{"C_meas", c_meas}, {"alpha", cfg.alpha}, {"dimension", basis.dimension()}, {"norms", rows}};
    c.threshold = {{"rule", "s_j <= C_meas^j (j!)^(-1/4); s_j == 0 for j > Nmax"}};
    c.pass = ok;
    return c;
}

CheckEntry check_positivity(const RunConfig& cfg) {
    CheckEntry c;
    c.name = "positivity_audit";
    auto grid = std::make_shared<ModeGrid>(ModeGrid::build(cfg.dense_delta, cfg.dense_lambda, cfg.max_modes));
    const auto basis = basis_for(*grid, cfg.dense_nmax, cfg.max_dim);
    FiberConfig fc{cfg.alpha, {0.0, 0.0, 0.0}, grid, cfg.dense_nmax};
    const auto flipped = sign_flip(assemble_fiber(fc, basis), basis);
    const double e0 = dense_spectrum(flipped, 1, cfg.dense_cap).front();
    const auto rep = resolvent_positivity_audit(flipped, 1.0 - e0, cfg.dense_cap);
    c.measured = {{"alpha", cfg.alpha},
                  {"dimension", basis.dimension()},
                  {"lambda", rep.lambda},
                  {"ground_energy", rep.ground_energy},
                  {"min_entry", rep.min_entry},
                  {"max_entry", rep.max_entry},
                  {"strictly_positive", rep.strictly_positive},
                  {"ground_vector_min", rep.ground_vector_min},
                  {"gap", num(rep.gap)},
                  {"psi_plus_max", rep.positive_part},
                  {"psi_minus_max", rep.negative_part},
                  {"single_signed", rep.single_signed}};
    c.threshold = {{"min_entry_relative", 1e-14}, {"gap", 1e-6}, {"vanishing_part", 1e-10}};
    if (cfg.alpha == 0.0) {
        c.gated = false;
        c.pass = !rep.strictly_positive;
        c.note = "not improving (decoupled)";
    } else {
        c.pass = rep.strictly_positive && rep.ground_vector_min > 0.0 && rep.gap > 1e-6 && rep.single_signed;
    }
    return c;
}

CheckEntry check_hvz(const RunConfig& cfg) {
    CheckEntry c;
    c.name = "hvz_edge";
    const auto rep =
        hvz_edge_check(cfg.alpha, {cfg.delta, cfg.lambda}, cfg.nmax, {0.0, 0.0, cfg.p_far}, cfg.edge_tol, settings_of(cfg));
    c.measured = {{"P_far", vec_json(rep.far_momentum)},
                  {"E0", rep.energy_zero},
                  {"E_far", rep.energy_far},
                  {"distance", rep.distance},
                  {"dressing_deficit", rep.dressing_deficit}};
    c.threshold = {{"min", 0.0}, {"max", rep.edge_tol}};
    c.pass = rep.pass;
    return c;
}

Json torus_json(const TorusReport& rep) {
    Json argmin = Json::array();
    for (const auto& f : rep.argmin) argmin.push_back(ivec_json(f));
    return Json{{"ground_energy", rep.ground_energy}, {"argmin", argmin},
                {"multiplicity", rep.multiplicity},   {"gap", num(rep.gap)},
                {"argmin_is_origin", rep.argmin_is_origin}, {"mechanism_consistent", rep.mechanism_consistent}};
}

TorusConfig torus_config(const RunConfig& cfg) {
    TorusConfig tc;
    tc.ell = cfg.ell;
    tc.fiber_cutoff = cfg.fiber_cutoff;
    tc.alpha = cfg.alpha;
    tc.grid = {cfg.delta, cfg.lambda};
    tc.n_max = cfg.nmax;
    return tc;
}

std::vector<CheckEntry> check_torus(const RunConfig& cfg) {
    const auto settings = settings_of(cfg);
    CheckEntry full;
    full.name = "torus_degeneracy";
    const auto model = assemble_torus(torus_config(cfg), settings);
    const auto rep = degeneracy_analysis(model, cfg.degeneracy_tol, settings);
    full.measured = torus_json(rep);
    full.measured["fibers"] = model.fibers.size();
    full.threshold = {{"argmin", Json::array({Json::array({0, 0, 0})})}, {"multiplicity", 1},
                      {"degeneracy_tol", cfg.degeneracy_tol}};
    full.pass = rep.argmin_is_origin && rep.multiplicity == 1 && rep.mechanism_consistent;

    CheckEntry restricted;
    restricted.name = "torus_restricted_pair";
    const IVec3 q{cfg.restricted_q[0], cfg.restricted_q[1], cfg.restricted_q[2]};
    auto tc = torus_config(cfg);
    tc.fibers = std::vector<IVec3>{q, -q};
    const auto pair_model = assemble_torus(tc, settings);
    const auto pair = degeneracy_analysis(pair_model, cfg.degeneracy_tol, settings);
    const double split = std::abs(pair.fibers[0].energies.front() - pair.fibers[1].energies.front());
    restricted.measured = torus_json(pair);
    restricted.measured["E_q_minus_E_neg_q"] = split;
    restricted.threshold = {{"multiplicity", 2}, {"max_split", 1e-10}};
    restricted.pass = pair.multiplicity == 2 && split <= 1e-10 && pair.mechanism_consistent;
    return {full, restricted};
}

CheckEntry check_extrapolation(const RunConfig& cfg) {
    CheckEntry c;
    c.name = "extrapolation";
    const CutoffSchedule schedule(cfg.schedule, cfg.delta, cfg.extrap_nmax);
    const auto rep = cutoff_extrapolate(cfg.alpha, schedule, {0.0, 0.0, 0.0}, settings_of(cfg));
    Json pts = Json::array();
    for (const auto& p : rep.points) pts.push_back({{"Lambda", p.cutoff}, {"energy", p.energy}});
    c.measured = {{"Nmax", cfg.extrap_nmax},          {"points", pts},
                  {"E_inf", rep.energy_limit},        {"slope", rep.slope},
                  {"fit_residual", rep.fit_residual}, {"monotone", rep.monotone},
                  {"weak_coupling_reference", -cfg.alpha / 8.0}};
    c.threshold = {{"monotone_slack", 1e-10}};
    c.pass = rep.monotone;
    return c;
}

int exit_for(bool pass) { return pass ? kExitPass : kExitCheckFailed; }

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void RunConfig::validate() const {
    auto require = [](bool ok, const std::string& what) {
        if (!ok) throw ConfigError(what);
    };
    require(std::isfinite(alpha) && alpha >= 0.0, "alpha must be >= 0");
    require(std::isfinite(delta) && delta > 0.0, "delta must be > 0");
    require(std::isfinite(lambda) && lambda > 0.0, "Lambda (lambda) must be > 0");
    require(nmax >= 0, "nmax must be >= 0");
    require(tol > 0.0, "tol must be > 0");
    require(threads >= 1, "threads must be >= 1");
    require(max_matvecs >= 1, "max_matvecs must be >= 1");
    require(!out_dir.empty(), "out must name a directory");
    require(mass_step > 0.0 && mass_step < 1.0, "mass_step must lie in (0, 1)");
    require(margin >= 0.0, "margin must be >= 0");
    require(edge_tol >= 0.0, "edge_tol must be >= 0");
    require(extrap_nmax >= 0, "extrap_nmax must be >= 0");
    require(ell > 0.0, "ell must be > 0");
    require(fiber_cutoff >= 0.0, "fiber_cutoff must be >= 0");
    require(degeneracy_tol > 0.0, "degeneracy_tol must be > 0");
    require(dense_delta > 0.0, "dense_delta must be > 0");
    require(dense_lambda > 0.0, "dense_lambda must be > 0");
    require(dense_nmax >= 0, "dense_nmax must be >= 0");
    require(neumann_nmax >= 0, "neumann_nmax must be >= 0");
    require(restricted_q.size() == 3, "restricted_q needs three integers");
    require(x.size() == 3 && x_prime.size() == 3, "x and x_prime need three coordinates");
    require(kernel_mass > 0.0, "kernel_mass must be > 0");
    require(image_cut >= 1, "image_cut must be >= 1");
    require(!p_samples.empty(), "p_samples must not be empty");
    for (std::size_t i = 1; i < schedule.size(); ++i)
        require(schedule[i] > schedule[i - 1], "schedule must be strictly increasing");
    for (double l : schedule) require(l > 0.0, "schedule values must be > 0");
}

bool parse_command_line(int argc, const char* const* argv, RunConfig& cfg, int& early_exit) {
    CLI::App app{"Fiber polaron spectral laboratory", "polaron"};
    app.set_config("--config", "", "Flat `key = value` configuration file");
    app.require_subcommand(1);

    app.add_option("--out", cfg.out_dir, "Output directory");
    app.add_option("--seed", cfg.seed, "Lanczos starting-vector seed");
    app.add_option("--threads", cfg.threads, "Worker threads for independent solves");
    app.add_option("--alpha", cfg.alpha, "Coupling constant");
    app.add_option("--delta", cfg.delta, "Mode lattice spacing");
    app.add_option("--lambda", cfg.lambda, "UV cutoff");
    app.add_option("--nmax", cfg.nmax, "Maximal total phonon number");
    app.add_option("--tol", cfg.tol, "Eigen-residual tolerance");
    app.add_option("--max_matvecs", cfg.max_matvecs, "Operator applications per eigen-solve");
    app.add_option("--dense_cap", cfg.dense_cap, "Dimension cap for dense verification");
    app.add_option("--max_dim", cfg.max_dim, "Basis dimension limit");
    app.add_option("--max_modes", cfg.max_modes, "Mode count limit");
    app.add_option("--p_samples", cfg.p_samples, "P_z samples")->delimiter(',');
    app.add_option("--mass_step", cfg.mass_step, "Finite-difference step h");
    app.add_option("--margin", cfg.margin, "Minimum-at-zero margin");
    app.add_option("--p_far", cfg.p_far, "HVZ probe |P_far| along z");
    app.add_option("--edge_tol", cfg.edge_tol, "HVZ edge tolerance");
    app.add_option("--schedule", cfg.schedule, "Cutoff schedule")->delimiter(',');
    app.add_option("--extrap_nmax", cfg.extrap_nmax, "Phonon cap of the extrapolation check");
    app.add_option("--extrap_p", cfg.extrap_p, "P_z for extrapolation");
    app.add_option("--ell", cfg.ell, "Torus side length");
    app.add_option("--fiber_cutoff", cfg.fiber_cutoff, "Largest |P| of torus fibers");
    app.add_option("--degeneracy_tol", cfg.degeneracy_tol, "Degeneracy tolerance");
    app.add_option("--fibers", cfg.fibers, "Explicit fibers 'x,y,z;x,y,z' in units of 2 pi/ell");
    app.add_option("--restricted_q", cfg.restricted_q, "q of the restricted {q,-q} torus check")->delimiter(',');
    app.add_option("--dense_delta", cfg.dense_delta, "Spacing of the dense check instance");
    app.add_option("--dense_lambda", cfg.dense_lambda, "Cutoff of the dense check instance");
    app.add_option("--dense_nmax", cfg.dense_nmax, "Phonon cap of the dense check instance");
    app.add_option("--neumann_nmax", cfg.neumann_nmax, "Phonon cap of the Neumann check");
    app.add_option("--x", cfg.x, "Kernel point x")->delimiter(',');
    app.add_option("--x_prime", cfg.x_prime, "Kernel point x'")->delimiter(',');
    app.add_option("--kernel_mass", cfg.kernel_mass, "Yukawa mass sqrt(n+1)");
    app.add_option("--image_cut", cfg.image_cut, "Largest image shell");

    for (const char* name : {"dispersion", "checks", "extrapolate", "torus", "kernel"}) {
        auto* sub = app.add_subcommand(name);
        sub->fallthrough();
        sub->callback([&cfg, name] { cfg.command = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        early_exit = app.exit(e);
        return false;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        early_exit = kExitConfig;
        return false;
    }
    return true;
}

int cmd_dispersion(const RunConfig& cfg, std::ostream& log) {
    const auto dir = prepare_out(cfg);
    const auto settings = settings_of(cfg);
    const GridParams grid{cfg.delta, cfg.lambda};
    const auto curve = dispersion_curve(cfg.alpha, along_z(cfg.p_samples), grid, cfg.nmax, settings);

    CsvWriter csv({"alpha", "Px", "Py", "Pz", "Pnorm", "Lambda", "delta", "Nmax", "energy", "residual", "iterations"});
    for (const auto& s : curve.samples) {
        csv.field(cfg.alpha).field(s.momentum[0]).field(s.momentum[1]).field(s.momentum[2]).field(s.momentum_norm);
        csv.field(cfg.lambda).field(cfg.delta).field(static_cast<long long>(cfg.nmax)).field(s.energy);
        csv.field(s.residual).field(static_cast<long long>(s.iterations));
        csv.end_row();
    }
    write_text(dir / "dispersion.csv", csv.str());

    Json verdict{{"command", "dispersion"}, {"config", physics_json(cfg)}};
    bool pass = true;

    const bool has_zero = std::any_of(curve.samples.begin(), curve.samples.end(),
                                      [](const DispersionSample& s) { return s.momentum_norm == 0.0; });
    if (has_zero && curve.samples.size() > 1) {
        const auto mc = minimum_check(curve, cfg.margin);
        verdict["minimum_check"] = {{"pass", mc.pass},
                                    {"margin", mc.margin},
                                    {"worst_margin", mc.worst_margin},
                                    {"E0", mc.energy_zero},
                                    {"argmin", vec_json(mc.argmin)},
                                    {"argmin_unique", mc.argmin_unique}};
        pass &= mc.pass;
        log << "[dispersion] minimum at zero: " << (mc.pass ? "pass" : "FAIL") << " (worst margin "
            << format_double(mc.worst_margin) << ")\n";
    } else {
        verdict["minimum_check"] = {{"pass", nullptr}, {"note", "samples do not include P = 0 and another P"}};
    }

    const auto mass = effective_mass(cfg.alpha, grid, cfg.nmax, cfg.mass_step, settings);
    verdict["effective_mass"] = {{"M_eff", num(mass.effective_mass)}, {"h", mass.step},
                                 {"E0", mass.energy_zero},            {"E_plus_h", mass.energy_plus},
                                 {"E_minus_h", mass.energy_minus},    {"curvature", mass.curvature},
                                 {"positive_curvature", mass.positive_curvature}};
    pass &= mass.positive_curvature;

    // Non-gating diagnostics.
    Json parabola = Json::array();
    if (mass.positive_curvature) {
        for (const auto& s : curve.samples) {
            if (s.momentum_norm == 0.0 || s.momentum_norm > 0.5) continue;
            const double bound = mass.energy_zero + s.momentum_norm * s.momentum_norm / (2.0 * mass.effective_mass);
            parabola.push_back({{"Pnorm", s.momentum_norm},
                                {"energy", s.energy},
                                {"bound", bound},
                                {"holds", s.energy <= bound + cfg.tol}});
        }
    }
    verdict["parabola_diagnostic"] = {{"gated", false}, {"samples", parabola}};
    verdict["mass_enhancement"] = {{"gated", false}, {"M_eff_above_free", mass.positive_curvature && mass.effective_mass > 0.5}};
    if (cfg.alpha == 0.0) {
        double dev = 0.0;
        for (const auto& s : curve.samples)
            dev = std::max(dev, std::abs(s.energy - std::min(s.momentum_norm * s.momentum_norm, 1.0)));
        verdict["free_reference"] = {{"gated", false}, {"max_deviation_from_min_P2_1", dev}};
    }
    verdict["pass"] = pass;
    write_json(dir / "verdict.json", verdict);
    log << "[dispersion] M_eff = " << format_double(mass.effective_mass) << "\n";
    return exit_for(pass);
}

int cmd_checks(const RunConfig& cfg, std::ostream& log) {
    const auto dir = prepare_out(cfg);
    std::vector<CheckEntry> entries;
    entries.push_back(check_kt_identity(cfg));
    entries.push_back(check_norm_bound(cfg));
    entries.push_back(check_neumann(cfg));
    entries.push_back(check_positivity(cfg));
    entries.push_back(check_hvz(cfg));
    for (auto& e : check_torus(cfg)) entries.push_back(std::move(e));
    entries.push_back(check_extrapolation(cfg));

    Json config = physics_json(cfg);
    config["dense_instance"] = {{"delta", cfg.dense_delta}, {"Lambda", cfg.dense_lambda}, {"Nmax", cfg.dense_nmax},
                                {"neumann_Nmax", cfg.neumann_nmax}};
    config["torus"] = {{"ell", cfg.ell}, {"fiber_cutoff", cfg.fiber_cutoff}, {"degeneracy_tol", cfg.degeneracy_tol}};
    config["schedule"] = cfg.schedule;

    Json list = Json::array();
    bool pass = true;
    for (const auto& e : entries) {
        list.push_back(e.to_json());
        if (e.gated) pass &= e.pass;
        log << "[checks] " << e.name << ": " << (e.gated ? (e.pass ? "pass" : "FAIL") : "info")
            << (e.note.empty() ? "" : " (" + e.note + ")") << "\n";
    }
    write_json(dir / "checks.json", Json{{"command", "checks"}, {"config", config}, {"checks", list}, {"pass", pass}});
    return exit_for(pass);
}

int cmd_extrapolate(const RunConfig& cfg, std::ostream& log) {
    const auto dir = prepare_out(cfg);
    const CutoffSchedule schedule(cfg.schedule, cfg.delta, cfg.nmax);
    const Vec3 p{0.0, 0.0, cfg.extrap_p};
    const auto rep = cutoff_extrapolate(cfg.alpha, schedule, p, settings_of(cfg));

    CsvWriter csv({"alpha", "Px", "Py", "Pz", "Lambda", "delta", "Nmax", "modes", "dimension", "energy", "residual",
                   "iterations"});
    for (const auto& pt : rep.points) {
        csv.field(cfg.alpha).field(p[0]).field(p[1]).field(p[2]).field(pt.cutoff).field(cfg.delta);
        csv.field(static_cast<long long>(cfg.nmax)).field(static_cast<long long>(pt.modes));
        csv.field(static_cast<long long>(pt.dimension)).field(pt.energy).field(pt.residual);
        csv.field(static_cast<long long>(pt.iterations));
        csv.end_row();
    }
    write_text(dir / "extrapolation.csv", csv.str());

    Json out{{"command", "extrapolate"},
             {"config", physics_json(cfg)},
             {"P", vec_json(p)},
             {"schedule", cfg.schedule},
             {"E_inf", rep.energy_limit},
             {"slope", rep.slope},
             {"fit_residual", rep.fit_residual},
             {"monotone", rep.monotone},
             {"weak_coupling_reference", -cfg.alpha / 8.0},
             {"pass", rep.monotone}};
    write_json(dir / "extrapolation.json", out);
    log << "[extrapolate] E_inf = " << format_double(rep.energy_limit) << ", monotone: " << rep.monotone << "\n";
    return exit_for(rep.monotone);
}

int cmd_torus(const RunConfig& cfg, std::ostream& log) {
    const auto dir = prepare_out(cfg);
    auto tc = torus_config(cfg);
    if (!cfg.fibers.empty()) tc.fibers = parse_fibers(cfg.fibers);
    const auto settings = settings_of(cfg);
    const auto model = assemble_torus(tc, settings);
    const auto rep = degeneracy_analysis(model, cfg.degeneracy_tol, settings);

    CsvWriter csv({"Px", "Py", "Pz", "E"});
    Json per_fiber = Json::array();
    for (const auto& f : rep.fibers) {
        csv.field(f.momentum[0]).field(f.momentum[1]).field(f.momentum[2]).field(f.energies.front());
        csv.end_row();
        per_fiber.push_back({{"fiber", ivec_json(f.fiber)}, {"P", vec_json(f.momentum)}, {"levels", f.energies}});
    }
    write_text(dir / "torus.csv", csv.str());

    Json out{{"command", "torus"}, {"config", physics_json(cfg)}, {"ell", cfg.ell}, {"fiber_cutoff", cfg.fiber_cutoff}};
    out["report"] = torus_json(rep);
    out["fibers"] = per_fiber;
    out["pass"] = rep.mechanism_consistent;
    write_json(dir / "torus.json", out);
    log << "[torus] multiplicity " << rep.multiplicity << ", argmin fibers " << rep.argmin.size() << "\n";
    return exit_for(rep.mechanism_consistent);
}

int cmd_kernel(const RunConfig& cfg, std::ostream& log) {
    const auto dir = prepare_out(cfg);
    const Vec3 x{cfg.x[0], cfg.x[1], cfg.x[2]};
    const Vec3 xp{cfg.x_prime[0], cfg.x_prime[1], cfg.x_prime[2]};
    CsvWriter csv({"image_cut", "value", "last_shell_relative"});
    KernelValue last;
    bool positive = true;
    for (int cut = 1; cut <= cfg.image_cut; ++cut) {
        last = periodized_yukawa(x, xp, cfg.ell, cfg.kernel_mass, cut);
        positive &= last.value > 0.0;
        csv.field(static_cast<long long>(cut)).field(last.value).field(last.last_shell_relative);
        csv.end_row();
    }
    write_text(dir / "kernel.csv", csv.str());
    write_json(dir / "kernel.json", Json{{"command", "kernel"},
                                         {"x", vec_json(x)},
                                         {"x_prime", vec_json(xp)},
                                         {"ell", cfg.ell},
                                         {"mass", cfg.kernel_mass},
                                         {"image_cut", cfg.image_cut},
                                         {"value", last.value},
                                         {"last_shell_relative", last.last_shell_relative},
                                         {"converged", last.converged},
                                         {"pass", positive}});
    log << "[kernel] value " << format_double(last.value) << "\n";
    return exit_for(positive);
}

int run_command(const RunConfig& cfg, std::ostream& log) {
    static const std::map<std::string, std::function<int(const RunConfig&, std::ostream&)>> commands{
        {"dispersion", cmd_dispersion}, {"checks", cmd_checks}, {"extrapolate", cmd_extrapolate},
        {"torus", cmd_torus},           {"kernel", cmd_kernel}};
    try {
        cfg.validate();
        const auto it = commands.find(cfg.command);
        if (it == commands.end()) throw ConfigError("unknown command '" + cfg.command + "'");
        return it->second(cfg, log);
    } catch (const ConvergenceError& e) {
        log << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const CapacityError& e) {
        log << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        log << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::domain_error& e) {
        log << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        log << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}

int run_cli(int argc, const char* const* argv, std::ostream& log) {
    RunConfig cfg;
    int code = 0;
    if (!parse_command_line(argc, argv, cfg, code)) return code;
    return run_command(cfg, log);
}

}  // namespace polaron
