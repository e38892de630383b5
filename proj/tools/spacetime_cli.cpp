// SPDX-License-Identifier: MIT
// Command-line driver: solves, studies, identity checks and marking.
#include "spacetime/adapt.hpp"
#include "spacetime/cfosls.hpp"
#include "spacetime/error.hpp"
#include "spacetime/galerkin.hpp"
#include "spacetime/identities.hpp"
#include "spacetime/io.hpp"
#include "spacetime/sampling.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace spacetime;

constexpr int exit_ok = 0;
constexpr int exit_solver = 1;
constexpr int exit_input = 2;

struct ProblemFlags {
    std::optional<std::string> preset, config_file, out;
    std::optional<std::string> grid, degree, eps, beta, final_time, theta, tol, max_iterations, restart;
    std::optional<std::string> source, initial, trace, schur_solver, elimination;
    int vtk_intervals = default_lattice_intervals;
};

void add_problem_flags(CLI::App& cmd, ProblemFlags& f, bool with_preset) {
    if (with_preset) {
        cmd.add_option("--preset", f.preset, "Experiment sweep: paper-fig1, paper-fig2, paper-fig3, paper-table1");
    }
    cmd.add_option("--config", f.config_file, "key=value config file");
    cmd.add_option("--out", f.out, "Output directory (default $SPACETIME_OUT_DIR or ./out)");
    cmd.add_option("--grid", f.grid, "Elements per direction: n or nx,ny,nt");
    cmd.add_option("--degree", f.degree, "B-spline degree");
    cmd.add_option("--eps", f.eps, "Diffusion coefficient");
    cmd.add_option("--beta", f.beta, "Advection velocity bx,by");
    cmd.add_option("--final-time", f.final_time, "Final time T");
    cmd.add_option("--theta", f.theta, "Marking fraction");
    cmd.add_option("--tol", f.tol, "Relative solver tolerance");
    cmd.add_option("--max-iterations", f.max_iterations, "Iteration cap");
    cmd.add_option("--restart", f.restart, "GMRES restart length");
    cmd.add_option("--source", f.source, "Source term: zero, one, manufactured");
    cmd.add_option("--initial", f.initial, "Initial state: zero, one, bump");
    cmd.add_option("--trace", f.trace, "Initial trace: lumped, greville, l2");
    cmd.add_option("--schur-solver", f.schur_solver, "cg, gmres, gmres-uzawa");
    cmd.add_option("--elimination", f.elimination, "exact or schur-only");
}

std::vector<ProblemConfig> resolve_configs(const ProblemFlags& f) {
    std::vector<ProblemConfig> configs = f.preset ? preset_configs(*f.preset) : std::vector<ProblemConfig>{{}};
    if (f.config_file) {
        for (auto& c : configs) c = load_config_file(*f.config_file, c);
    }
    const std::pair<const char*, const std::optional<std::string>*> settings[] = {
        {"grid", &f.grid},
        {"degree", &f.degree},
        {"eps", &f.eps},
        {"beta", &f.beta},
        {"final_time", &f.final_time},
        {"theta", &f.theta},
        {"tol", &f.tol},
        {"max_iterations", &f.max_iterations},
        {"restart", &f.restart},
        {"source", &f.source},
        {"initial", &f.initial},
        {"trace", &f.trace},
        {"schur_solver", &f.schur_solver},
        {"elimination", &f.elimination},
    };
    for (auto& c : configs) {
        for (const auto& [key, value] : settings) {
            if (*value) apply_setting(c, key, **value);
        }
        c.validate();
    }
    // overrides can collapse a sweep onto repeated runs
    std::vector<ProblemConfig> unique;
    for (const auto& c : configs) {
        if (std::find(unique.begin(), unique.end(), c) == unique.end()) unique.push_back(c);
    }
    return unique;
}

std::string run_tag(std::string_view solver, const ProblemConfig& c) {
    return fmt::format("{}_{}_p{}_eps{:g}_beta{:g},{:g}", solver, grid_label(c.grid), c.degree, c.eps, c.beta[0],
                       c.beta[1]);
}

int run_solves(const ProblemFlags& flags, bool stabilized) {
    const auto configs = resolve_configs(flags);
    const auto dir = output_directory(flags.out);
    std::filesystem::create_directories(dir);
    const std::string solver = stabilized ? "cfosls" : "galerkin";

    RunManifest manifest;
    manifest.version = artifact_version();
    manifest.started = timestamp_now();
    std::vector<ReportRow> rows;
    int rc = exit_ok;
    for (const auto& cfg : configs) {
        manifest.configs.push_back(cfg);
        const Discretization disc = make_discretization(cfg);
        Field phi_full;
        SolveReport report;
        std::optional<double> J;
        try {
            if (stabilized) {
                auto sol = solve_cfosls(cfg);
                phi_full = std::move(sol.phi_full);
                report = std::move(sol.report);
                J = sol.J.total;
            } else {
                auto sol = solve_unstabilized(cfg);
                phi_full = std::move(sol.phi_full);
                report = std::move(sol.report);
            }
        } catch (const SolverError& e) {
            fmt::print(stderr, "{} {}: {}\n", solver, grid_label(cfg.grid), e.what());
            manifest.timings.push_back({});
            rc = exit_solver;
            continue;
        }
        manifest.timings.push_back(report.timings);
        const auto vtk = dir / (run_tag(solver, cfg) + ".vtk");
        write_vtk(disc, phi_full, vtk, flags.vtk_intervals);
        manifest.outputs.push_back(vtk.string());
        rows.push_back({grid_label(cfg.grid), report.dofs.sigma_dofs, J, report.timings.solve});

        fmt::print("{} grid={} p={} eps={:g} beta=({:g},{:g}) dofs={} iterations={} status={} solve={:.3f}s", solver,
                   grid_label(cfg.grid), cfg.degree, cfg.eps, cfg.beta[0], cfg.beta[1], report.dofs.sigma_dofs,
                   report.iterations, to_string(report.status), report.timings.solve);
        if (J) fmt::print(" J={:.6e}", *J);
        fmt::print(" undershoot={:.3e}\n", undershoot(disc, phi_full, flags.vtk_intervals));
        if (!report.converged()) {
            fmt::print(stderr, "{} {}: {}\n", solver, grid_label(cfg.grid), report.message);
            rc = exit_solver;
        }
    }
    const auto csv = dir / fmt::format("{}_report.csv", solver);
    write_report_csv(rows, csv, "grid");
    manifest.outputs.push_back(csv.string());
    const auto manifest_path = dir / fmt::format("{}_manifest.json", solver);
    manifest.outputs.push_back(manifest_path.string());
    write_manifest(manifest, manifest_path);
    fmt::print("wrote {}\n", dir.string());
    return rc;
}

int run_identities(const ProblemFlags& flags, int samples) {
    constexpr double tol = 1e-10;
    int rc = exit_ok;
    for (const auto& cfg : resolve_configs(flags)) {
        const IdentityDeviations d = identity_deviations(cfg, samples);
        fmt::print("grid={} p={} eps={:g} beta=({:g},{:g})\n", grid_label(cfg.grid), cfg.degree, cfg.eps, cfg.beta[0],
                   cfg.beta[1]);
        const std::pair<const char*, double> rows[] = {
            {"K = sum L^T M^-1 L", d.k}, {"Kst = sum A M^-1 A^T", d.s}, {"M_phi = M_ps M^-1 M_ps^T", d.mass}};
        for (const auto& [name, value] : rows) {
            const bool ok = value < tol;
            fmt::print("  {:<26} max deviation {:.3e}  {}\n", name, value, ok ? "ok" : "exceeds 1e-10");
            if (!ok) rc = exit_solver;
        }
    }
    return rc;
}

int run_study(const ProblemFlags& flags, int levels) {
    const auto configs = resolve_configs(flags);
    const auto dir = output_directory(flags.out);
    std::filesystem::create_directories(dir);
    int rc = exit_ok;
    RunManifest manifest;
    manifest.version = artifact_version();
    manifest.started = timestamp_now();
    for (std::size_t k = 0; k < configs.size(); ++k) {
        const auto study = refinement_study(configs[k], levels);
        std::vector<ReportRow> rows;
        for (const auto& r : study) {
            fmt::print("level={} grid={} dofs={} J={:.6e} iterations={} marked={:.3f} solve={:.3f}s{}\n", r.level,
                       grid_label(r.grid), r.dofs, r.J, r.iterations, r.marked_fraction, r.solver_seconds,
                       r.ok ? "" : " FAILED: " + r.failure);
            if (!r.ok) {
                rc = exit_solver;
                continue;
            }
            rows.push_back({std::to_string(r.level), r.dofs, r.J, r.solver_seconds});
        }
        const auto csv = dir / (configs.size() == 1 ? std::string{"study.csv"} : fmt::format("study_{}.csv", k));
        write_report_csv(rows, csv, "level");
        manifest.configs.push_back(configs[k]);
        manifest.outputs.push_back(csv.string());
    }
    const auto manifest_path = dir / "study_manifest.json";
    manifest.outputs.push_back(manifest_path.string());
    write_manifest(manifest, manifest_path);
    return rc;
}

std::vector<double> parse_indicator_list(std::string_view text) {
    std::string s{text};
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream in{s};
    in.imbue(std::locale::classic());
    std::vector<double> out;
    std::string token;
    while (in >> token) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(token, &used));
            if (used != token.size()) throw std::invalid_argument{token};
        } catch (const std::logic_error&) {
            throw InputError{fmt::format("indicator '{}' is not a number", token)};
        }
    }
    return out;
}

int run_mark(double theta, const std::optional<std::string>& list, const std::optional<std::string>& file) {
    std::vector<double> indicators;
    if (list) {
        indicators = parse_indicator_list(*list);
    } else if (!file) {
        throw InputError{"mark needs --indicators or --indicator-file"};
    } else {
        std::ifstream in{*file};
        if (!in) throw InputError{fmt::format("cannot read indicator file {}", *file)};
        std::stringstream ss;
        ss << in.rdbuf();
        indicators = parse_indicator_list(ss.str());
    }
    const auto marked = doerfler_mark(indicators, {theta});
    fmt::print("{{{}}}\n", fmt::join(marked, ", "));
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Space-time advection-diffusion solver"};
    app.require_subcommand(1);

    ProblemFlags solve_flags;
    auto* solve = app.add_subcommand("solve", "Constrained first-order least-squares solve");
    add_problem_flags(*solve, solve_flags, true);
    solve->add_option("--vtk-intervals", solve_flags.vtk_intervals, "Lattice intervals per direction")
        ->check(CLI::PositiveNumber);

    ProblemFlags galerkin_flags;
    auto* galerkin = app.add_subcommand("solve-unstabilized", "Plain Galerkin solve of the first-order system");
    add_problem_flags(*galerkin, galerkin_flags, true);
    galerkin->add_option("--vtk-intervals", galerkin_flags.vtk_intervals, "Lattice intervals per direction")
        ->check(CLI::PositiveNumber);

    ProblemFlags identity_flags;
    int samples = 20;
    auto* identities = app.add_subcommand("verify-identities", "Check the block identities on random vectors");
    add_problem_flags(*identities, identity_flags, false);
    identities->add_option("--samples", samples, "Random vectors per identity")->check(CLI::PositiveNumber);

    ProblemFlags study_flags;
    int levels = 3;
    auto* study = app.add_subcommand("study", "Uniform refinement study");
    add_problem_flags(*study, study_flags, true);
    study->add_option("--levels", levels, "Number of levels")->check(CLI::PositiveNumber);

    double theta = 0.5;
    std::optional<std::string> indicator_list, indicator_file;
    auto* mark = app.add_subcommand("mark", "Doerfler marking of element indicators");
    mark->add_option("--theta", theta, "Marking fraction in (0, 1]");
    auto* list_opt = mark->add_option("--indicators", indicator_list, "Comma-separated indicators");
    auto* file_opt = mark->add_option("--indicator-file", indicator_file, "File of indicators");
    list_opt->excludes(file_opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_input;
    }

    try {
        if (*solve) return run_solves(solve_flags, true);
        if (*galerkin) return run_solves(galerkin_flags, false);
        if (*identities) return run_identities(identity_flags, samples);
        if (*study) return run_study(study_flags, levels);
        return run_mark(theta, indicator_list, indicator_file);
    } catch (const InputError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return exit_input;
    } catch (const SolverError& e) {
        fmt::print(stderr, "solver failure: {}\n", e.what());
        return exit_solver;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return exit_solver;
    }
}
