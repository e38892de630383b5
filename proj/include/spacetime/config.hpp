// SPDX-License-Identifier: MIT
#pragma once

#include <array>
#include <string>
#include <string_view>

namespace spacetime {

enum class SourceKind { zero, one, manufactured };
enum class InitialKind { zero, one, bump };
/// How the t = 0 trace of u0 is turned into coefficients.
enum class TraceKind { greville, lumped, l2 };
enum class SchurSolverKind { cg, gmres, gmres_uzawa };
/// exact keeps the K - Σ LᵀM⁻¹L remainder in the reduced operator; schur_only drops it.
enum class EliminationKind { exact, schur_only };

std::string_view to_string(SourceKind k);
std::string_view to_string(InitialKind k);
std::string_view to_string(TraceKind k);
std::string_view to_string(SchurSolverKind k);
std::string_view to_string(EliminationKind k);

SourceKind parse_source(std::string_view s);
InitialKind parse_initial(std::string_view s);
TraceKind parse_trace(std::string_view s);
SchurSolverKind parse_schur_solver(std::string_view s);
EliminationKind parse_elimination(std::string_view s);

/// Problem: φ_t - ε Δφ + β·∇φ = f on (0,1)² × (0,T), φ = 0 on the spatial boundary, φ(·,0) = u0.
struct ProblemConfig {
    double eps = 1e-2;
    std::array<double, 2> beta{0.0, 0.0};
    double final_time = 1.0;
    std::array<int, 3> grid{16, 16, 16};
    int degree = 2;
    SourceKind source = SourceKind::zero;
    InitialKind initial = InitialKind::bump;
    TraceKind trace = TraceKind::lumped;
    double theta = 0.5;
    double tol = 1e-8;
    int max_iterations = 20000;
    int restart = 200;
    SchurSolverKind schur_solver = SchurSolverKind::cg;
    EliminationKind elimination = EliminationKind::exact;

    /// Throws InputError naming the offending field.
    void validate() const;
    friend bool operator==(const ProblemConfig&, const ProblemConfig&) = default;
};

} // namespace spacetime
