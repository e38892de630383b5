// SPDX-License-Identifier: MIT
#pragma once

#include "spacetime/assembly.hpp"
#include "spacetime/krylov.hpp"

#include <limits>
#include <string>
#include <vector>

namespace spacetime {

struct PhaseTimings {
    double assembly = 0.0;
    double eigensetup = 0.0;
    double solve = 0.0;
    double backsub = 0.0;

    double total() const noexcept { return assembly + eigensetup + solve + backsub; }
};

struct SolveReport {
    std::string solver;
    int iterations = 0;
    std::vector<double> history;
    KrylovStatus status = KrylovStatus::max_iterations;
    std::string message;
    int negative_curvature_events = 0;
    double J = std::numeric_limits<double>::quiet_NaN();
    double constraint_residual = std::numeric_limits<double>::quiet_NaN();
    double block_residual = std::numeric_limits<double>::quiet_NaN();
    double smallest_s_eigenvalue = std::numeric_limits<double>::quiet_NaN();
    int s_null_dimension = 0;
    PhaseTimings timings;
    DofCounts dofs;

    bool converged() const noexcept { return status == KrylovStatus::converged; }
};

} // namespace spacetime
