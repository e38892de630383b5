// SPDX-License-Identifier: MIT
#include "spacetime/io.hpp"

#include "spacetime/error.hpp"
#include "spacetime/sampling.hpp"

#include <fmt/format.h>

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#ifndef SPACETIME_VERSION
#define SPACETIME_VERSION "unknown"
#endif

namespace spacetime {

namespace {

std::string_view trim_ws(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim_ws(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) {
            return out;
        }
        start = pos + 1;
    }
}

double parse_double(std::string_view key, std::string_view v) {
    v = trim_ws(v);
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) {
        throw InputError{fmt::format("config key '{}': '{}' is not a number", key, v)};
    }
    return x;
}

int parse_int(std::string_view key, std::string_view v) {
    v = trim_ws(v);
    int x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) {
        throw InputError{fmt::format("config key '{}': '{}' is not an integer", key, v)};
    }
    return x;
}

template <class F>
auto keyed(std::string_view key, F&& f) {
    try {
        return f();
    } catch (const InputError& e) {
        throw InputError{fmt::format("config key '{}': {}", key, e.what())};
    }
}

std::string fmt_double(double x) {
    return fmt::format("{:.17g}", x);
}

} // namespace

void apply_setting(ProblemConfig& cfg, std::string_view key, std::string_view value) {
    key = trim_ws(key);
    value = trim_ws(value);
    if (key == "eps") {
        cfg.eps = parse_double(key, value);
    } else if (key == "beta") {
        const auto parts = split(value, ',');
        if (parts.size() != 2) {
            throw InputError{fmt::format("config key 'beta': expected two comma-separated values, got '{}'", value)};
        }
        cfg.beta = {parse_double(key, parts[0]), parse_double(key, parts[1])};
    } else if (key == "final_time") {
        cfg.final_time = parse_double(key, value);
    } else if (key == "grid") {
        const auto parts = split(value, ',');
        if (parts.size() == 1) {
            const int n = parse_int(key, parts[0]);
            cfg.grid = {n, n, n};
        } else if (parts.size() == 3) {
            cfg.grid = {parse_int(key, parts[0]), parse_int(key, parts[1]), parse_int(key, parts[2])};
        } else {
            throw InputError{fmt::format("config key 'grid': expected n or nx,ny,nt, got '{}'", value)};
        }
    } else if (key == "degree") {
        cfg.degree = parse_int(key, value);
    } else if (key == "source") {
        cfg.source = keyed(key, [&] { return parse_source(value); });
    } else if (key == "initial") {
        cfg.initial = keyed(key, [&] { return parse_initial(value); });
    } else if (key == "trace") {
        cfg.trace = keyed(key, [&] { return parse_trace(value); });
    } else if (key == "theta") {
        cfg.theta = parse_double(key, value);
    } else if (key == "tol") {
        cfg.tol = parse_double(key, value);
    } else if (key == "max_iterations") {
        cfg.max_iterations = parse_int(key, value);
    } else if (key == "restart") {
        cfg.restart = parse_int(key, value);
    } else if (key == "schur_solver") {
        cfg.schur_solver = keyed(key, [&] { return parse_schur_solver(value); });
    } else if (key == "elimination") {
        cfg.elimination = keyed(key, [&] { return parse_elimination(value); });
    } else {
        throw InputError{fmt::format("unknown config key '{}'", key)};
    }
}

ProblemConfig parse_config(std::string_view text, const ProblemConfig& base) {
    ProblemConfig cfg = base;
    int line_no = 0;
    for (std::string_view line : split(text, '\n')) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim_ws(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw InputError{fmt::format("config line {}: expected key=value, got '{}'", line_no, line)};
        }
        apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
    }
    cfg.validate();
    return cfg;
}

ProblemConfig load_config_file(const std::filesystem::path& path, const ProblemConfig& base) {
    std::ifstream in{path};
    if (!in) {
        throw InputError{fmt::format("cannot read config file {}", path.string())};
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), base);
}

std::string serialize_config(const ProblemConfig& c) {
    std::string s;
    s += fmt::format("eps={}\n", fmt_double(c.eps));
    s += fmt::format("beta={},{}\n", fmt_double(c.beta[0]), fmt_double(c.beta[1]));
    s += fmt::format("final_time={}\n", fmt_double(c.final_time));
    s += fmt::format("grid={},{},{}\n", c.grid[0], c.grid[1], c.grid[2]);
    s += fmt::format("degree={}\n", c.degree);
    s += fmt::format("source={}\n", to_string(c.source));
    s += fmt::format("initial={}\n", to_string(c.initial));
    s += fmt::format("trace={}\n", to_string(c.trace));
    s += fmt::format("theta={}\n", fmt_double(c.theta));
    s += fmt::format("tol={}\n", fmt_double(c.tol));
    s += fmt::format("max_iterations={}\n", c.max_iterations);
    s += fmt::format("restart={}\n", c.restart);
    s += fmt::format("schur_solver={}\n", to_string(c.schur_solver));
    s += fmt::format("elimination={}\n", to_string(c.elimination));
    return s;
}

std::vector<std::string> preset_names() {
    return {"paper-fig1", "paper-fig2", "paper-fig3", "paper-table1"};
}

std::vector<ProblemConfig> preset_configs(std::string_view name) {
    ProblemConfig base;
    base.grid = {32, 32, 32};
    base.degree = 2;
    base.initial = InitialKind::bump;
    base.source = SourceKind::zero;
    std::vector<ProblemConfig> out;
    auto add = [&](double eps, double s, int n = 32) {
        ProblemConfig c = base;
        c.eps = eps;
        c.beta = {0.0, s};
        c.grid = {n, n, n};
        out.push_back(c);
    };
    if (name == "paper-fig1") {
        for (double eps : {5e-3, 1e-3, 1e-5}) add(eps, 0.0);
    } else if (name == "paper-fig2") {
        add(1e-3, 0.3);
        add(1e-5, 0.3);
        add(1e-6, 0.5);
        add(1e-3, 1.0);
        add(1e-5, 1.0);
        add(1e-6, 1.0);
    } else if (name == "paper-fig3") {
        add(1e-3, 1.0);
        add(1e-5, 0.5);
        add(1e-6, 1.0);
    } else if (name == "paper-table1") {
        for (int n : {16, 24, 32, 64}) add(1e-5, 0.3, n);
    } else {
        std::string names;
        for (const auto& n : preset_names()) names += (names.empty() ? "" : ", ") + n;
        throw InputError{fmt::format("unknown preset '{}' (expected one of: {})", name, names)};
    }
    return out;
}

std::filesystem::path output_directory(const std::optional<std::string>& explicit_dir) {
    if (explicit_dir && !explicit_dir->empty()) {
        return *explicit_dir;
    }
    if (const char* env = std::getenv("SPACETIME_OUT_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return "out";
}

void write_vtk(const Discretization& disc, const Field& coefficients, const std::filesystem::path& path,
               int intervals) {
    const Field values = evaluate_lattice(disc, coefficients, intervals);
    std::ofstream out{path, std::ios::binary};
    if (!out) {
        throw std::runtime_error{fmt::format("cannot open {} for writing", path.string())};
    }
    const double h = 1.0 / intervals;
    std::string s;
    s += "# vtk DataFile Version 3.0\n";
    s += "phi\nASCII\nDATASET STRUCTURED_POINTS\n";
    s += fmt::format("DIMENSIONS {} {} {}\n", intervals + 1, intervals + 1, intervals + 1);
    s += "ORIGIN 0 0 0\n";
    s += fmt::format("SPACING {} {} {}\n", fmt_double(h * disc.lengths[0]), fmt_double(h * disc.lengths[1]),
                     fmt_double(h * disc.lengths[2]));
    s += fmt::format("POINT_DATA {}\n", values.size());
    s += "SCALARS phi double 1\nLOOKUP_TABLE default\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
        s += fmt::format("{:.17g}\n", values[i]);
    }
    out << s;
    if (!out) {
        throw std::runtime_error{fmt::format("write to {} failed", path.string())};
    }
}

std::string grid_label(const std::array<int, 3>& grid) {
    return fmt::format("{}x{}x{}", grid[0], grid[1], grid[2]);
}

void write_report_csv(const std::vector<ReportRow>& rows, const std::filesystem::path& path,
                      std::string_view first_column) {
    std::ofstream out{path, std::ios::binary};
    if (!out) {
        throw std::runtime_error{fmt::format("cannot open {} for writing", path.string())};
    }
    std::string s = fmt::format("{},dofs,J,solver_seconds\n", first_column);
    for (const auto& r : rows) {
        s += fmt::format("{},{},{},{:.6g}\n", r.label, r.dofs, r.J ? fmt::format("{:.10g}", *r.J) : "",
                         r.solver_seconds);
    }
    out << s;
    if (!out) {
        throw std::runtime_error{fmt::format("write to {} failed", path.string())};
    }
}

std::string artifact_version() {
    return SPACETIME_VERSION;
}

std::string timestamp_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

nlohmann::json to_json(const RunManifest& m) {
    nlohmann::json j;
    j["version"] = m.version;
    j["started"] = m.started;
    j["configs"] = nlohmann::json::array();
    for (const auto& c : m.configs) {
        nlohmann::json cj = nlohmann::json::object();
        const std::string text = serialize_config(c);
        for (std::string_view line : split(text, '\n')) {
            if (line.empty()) continue;
            const auto eq = line.find('=');
            cj[std::string{line.substr(0, eq)}] = std::string{line.substr(eq + 1)};
        }
        j["configs"].push_back(cj);
    }
    j["timings"] = nlohmann::json::array();
    for (const auto& t : m.timings) {
        j["timings"].push_back({{"assembly", t.assembly},
                                {"eigensetup", t.eigensetup},
                                {"solve", t.solve},
                                {"backsub", t.backsub}});
    }
    j["outputs"] = m.outputs;
    return j;
}

RunManifest manifest_from_json(const nlohmann::json& j) {
    RunManifest m;
    try {
        m.version = j.at("version").get<std::string>();
        m.started = j.at("started").get<std::string>();
        for (const auto& cj : j.at("configs")) {
            ProblemConfig c;
            for (const auto& [k, v] : cj.items()) {
                apply_setting(c, k, v.get<std::string>());
            }
            m.configs.push_back(c);
        }
        for (const auto& tj : j.at("timings")) {
            m.timings.push_back({tj.at("assembly").get<double>(), tj.at("eigensetup").get<double>(),
                                 tj.at("solve").get<double>(), tj.at("backsub").get<double>()});
        }
        m.outputs = j.at("outputs").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw InputError{fmt::format("malformed run manifest: {}", e.what())};
    }
    return m;
}

void write_manifest(const RunManifest& m, const std::filesystem::path& path) {
    std::ofstream out{path, std::ios::binary};
    if (!out) {
        throw std::runtime_error{fmt::format("cannot open {} for writing", path.string())};
    }
    out << to_json(m).dump(2) << "\n";
}

} // namespace spacetime
