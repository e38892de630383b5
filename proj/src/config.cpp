// SPDX-License-Identifier: MIT
#include "spacetime/config.hpp"

#include "spacetime/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <utility>

namespace spacetime {

namespace {

template <class E, std::size_t N>
E parse_enum(std::string_view s, const std::pair<E, std::string_view> (&table)[N], const char* what) {
    for (const auto& [e, name] : table) {
        if (name == s) {
            return e;
        }
    }
    std::string options;
    for (const auto& [e, name] : table) {
        options += options.empty() ? "" : ", ";
        options += name;
    }
    throw InputError{fmt::format("unknown {} '{}' (expected one of: {})", what, s, options)};
}

template <class E, std::size_t N>
std::string_view enum_name(E k, const std::pair<E, std::string_view> (&table)[N]) {
    for (const auto& [e, name] : table) {
        if (e == k) {
            return name;
        }
    }
    return "?";
}

constexpr std::pair<SourceKind, std::string_view> sources[] = {
    {SourceKind::zero, "zero"}, {SourceKind::one, "one"}, {SourceKind::manufactured, "manufactured"}};
constexpr std::pair<InitialKind, std::string_view> initials[] = {
    {InitialKind::zero, "zero"}, {InitialKind::one, "one"}, {InitialKind::bump, "bump"}};
constexpr std::pair<TraceKind, std::string_view> traces[] = {{TraceKind::greville, "greville"}, {TraceKind::lumped, "lumped"},
                                                             {TraceKind::l2, "l2"}};
constexpr std::pair<SchurSolverKind, std::string_view> schur_solvers[] = {
    {SchurSolverKind::cg, "cg"}, {SchurSolverKind::gmres, "gmres"}, {SchurSolverKind::gmres_uzawa, "gmres-uzawa"}};
constexpr std::pair<EliminationKind, std::string_view> eliminations[] = {{EliminationKind::exact, "exact"},
                                                                         {EliminationKind::schur_only, "schur-only"}};

} // namespace

std::string_view to_string(SourceKind k) { return enum_name(k, sources); }
std::string_view to_string(InitialKind k) { return enum_name(k, initials); }
std::string_view to_string(TraceKind k) { return enum_name(k, traces); }
std::string_view to_string(SchurSolverKind k) { return enum_name(k, schur_solvers); }
std::string_view to_string(EliminationKind k) { return enum_name(k, eliminations); }

SourceKind parse_source(std::string_view s) { return parse_enum(s, sources, "source"); }
InitialKind parse_initial(std::string_view s) { return parse_enum(s, initials, "initial"); }
TraceKind parse_trace(std::string_view s) { return parse_enum(s, traces, "trace"); }
SchurSolverKind parse_schur_solver(std::string_view s) { return parse_enum(s, schur_solvers, "schur_solver"); }
EliminationKind parse_elimination(std::string_view s) { return parse_enum(s, eliminations, "elimination"); }

void ProblemConfig::validate() const {
    if (!(eps > 0.0) || !std::isfinite(eps)) {
        throw InputError{fmt::format("eps must be positive, got {}", eps)};
    }
    if (!std::isfinite(beta[0]) || !std::isfinite(beta[1])) {
        throw InputError{"beta must be finite"};
    }
    if (!(final_time > 0.0) || !std::isfinite(final_time)) {
        throw InputError{fmt::format("final_time must be positive, got {}", final_time)};
    }
    for (int n : grid) {
        if (n < 2) {
            throw InputError{fmt::format("grid needs at least 2 elements per direction, got {}", n)};
        }
    }
    if (degree < 1) {
        throw InputError{fmt::format("degree must be at least 1, got {}", degree)};
    }
    if (!(theta > 0.0 && theta <= 1.0)) {
        throw InputError{fmt::format("theta must lie in (0,1], got {}", theta)};
    }
    if (!(tol > 0.0)) {
        throw InputError{fmt::format("tol must be positive, got {}", tol)};
    }
    if (max_iterations < 1) {
        throw InputError{fmt::format("max_iterations must be at least 1, got {}", max_iterations)};
    }
    if (restart < 0) {
        throw InputError{fmt::format("restart must be nonnegative, got {}", restart)};
    }
}

} // namespace spacetime
