// SPDX-License-Identifier: MIT
#pragma once

#include "spacetime/report.hpp"
#include "spacetime/sampling.hpp"

namespace spacetime {

/// Unstabilized first-order Galerkin system on (φ, σx, σy):
///   A_t φ + A_x σx + A_y σy = f   (tested with the φ space)
///   M σx - L_x φ = 0,  M σy - L_y φ = 0
/// σ is eliminated through exact mass solves and GMRES runs on the φ system.
struct GalerkinSolution {
    Field phi;       // trimmed unknowns
    Field phi_full;  // with the lifted initial layer
    Field sigma_x, sigma_y;
    SolveReport report;
};

GalerkinSolution solve_unstabilized(const ProblemConfig& config);
GalerkinSolution solve_unstabilized(const Discretization& disc, const GlobalOperators& ops, const LoadVector& load);

/// Relative residual of the three block rows for a given solution.
double galerkin_block_residual(const Discretization& disc, const GlobalOperators& ops, const LoadVector& load,
                               const GalerkinSolution& sol);

} // namespace spacetime
