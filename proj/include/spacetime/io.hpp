// SPDX-License-Identifier: MIT
#pragma once

#include "spacetime/assembly.hpp"
#include "spacetime/report.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spacetime {

/// Sets one config field from its text form. Throws InputError naming the key.
void apply_setting(ProblemConfig& cfg, std::string_view key, std::string_view value);

/// Flat key=value text; '#' starts a comment. Keys not set keep the values of base.
ProblemConfig parse_config(std::string_view text, const ProblemConfig& base = {});
ProblemConfig load_config_file(const std::filesystem::path& path, const ProblemConfig& base = {});
/// Every field as key=value lines; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ProblemConfig& cfg);

/// Named experiment sweeps.
std::vector<ProblemConfig> preset_configs(std::string_view name);
std::vector<std::string> preset_names();

/// Output directory: explicit value, else $SPACETIME_OUT_DIR, else "out".
std::filesystem::path output_directory(const std::optional<std::string>& explicit_dir);

/// Legacy ASCII structured-points file with the expansion sampled on the (s+1)³ lattice.
void write_vtk(const Discretization& disc, const Field& coefficients, const std::filesystem::path& path,
               int intervals = 32);

struct ReportRow {
    std::string label;  // grid ("16x16x16") or level
    std::size_t dofs = 0;
    std::optional<double> J;
    double solver_seconds = 0.0;
};

/// CSV with header "<first_column>,dofs,J,solver_seconds".
void write_report_csv(const std::vector<ReportRow>& rows, const std::filesystem::path& path,
                      std::string_view first_column = "grid");

std::string grid_label(const std::array<int, 3>& grid);

struct RunManifest {
    std::vector<ProblemConfig> configs;
    std::string version;
    std::string started;
    std::vector<PhaseTimings> timings;
    std::vector<std::string> outputs;
};

std::string artifact_version();
std::string timestamp_now();

nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);
void write_manifest(const RunManifest& m, const std::filesystem::path& path);

} // namespace spacetime
