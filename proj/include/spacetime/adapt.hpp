// SPDX-License-Identifier: MIT
#pragma once

#include "spacetime/config.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace spacetime {

struct MarkingConfig {
    double theta = 0.5;
};

/// Dörfler marking: the smallest set of elements whose indicators sum to at least
/// theta times the total. Larger indicators first, ties by lower index. Returned
/// indices are ascending.
std::vector<std::size_t> doerfler_mark(std::span<const double> indicators, const MarkingConfig& cfg);

struct RefinementStudyRow {
    int level = 0;
    std::array<int, 3> grid{};
    std::size_t dofs = 0;
    double J = 0.0;
    double solver_seconds = 0.0;
    int iterations = 0;
    /// Fraction of elements marked by the J indicator at the configured theta.
    double marked_fraction = 0.0;
    bool ok = true;
    std::string failure;
};

/// Uniform refinement: level k solves on the base grid doubled k times per direction.
/// A failing level is recorded and ends the study.
std::vector<RefinementStudyRow> refinement_study(const ProblemConfig& base, int levels);

} // namespace spacetime
