// SPDX-License-Identifier: MIT
#include "spacetime/adapt.hpp"

#include "spacetime/cfosls.hpp"
#include "spacetime/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace spacetime {

std::vector<std::size_t> doerfler_mark(std::span<const double> indicators, const MarkingConfig& cfg) {
    if (!(cfg.theta > 0.0 && cfg.theta <= 1.0)) {
        throw InputError{fmt::format("theta must lie in (0,1], got {}", cfg.theta)};
    }
    double total = 0.0;
    for (std::size_t i = 0; i < indicators.size(); ++i) {
        if (!(indicators[i] >= 0.0) || !std::isfinite(indicators[i])) {
            throw InputError{fmt::format("indicator {} is not a finite nonnegative number ({})", i, indicators[i])};
        }
        total += indicators[i];
    }
    if (!(total > 0.0)) {
        throw InputError{"all indicators are zero, nothing to mark"};
    }
    std::vector<std::size_t> order(indicators.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return indicators[a] > indicators[b]; });
    const double goal = cfg.theta * total;
    std::vector<std::size_t> marked;
    double sum = 0.0;
    for (std::size_t i : order) {
        if (sum >= goal) {
            break;
        }
        marked.push_back(i);
        sum += indicators[i];
    }
    std::sort(marked.begin(), marked.end());
    return marked;
}

std::vector<RefinementStudyRow> refinement_study(const ProblemConfig& base, int levels) {
    if (levels < 1) {
        throw InputError{fmt::format("refinement study needs at least one level, got {}", levels)};
    }
    base.validate();
    std::vector<RefinementStudyRow> rows;
    for (int level = 0; level < levels; ++level) {
        ProblemConfig cfg = base;
        for (int d = 0; d < 3; ++d) {
            cfg.grid[d] = base.grid[d] << level;
        }
        RefinementStudyRow row;
        row.level = level;
        row.grid = cfg.grid;
        row.dofs = dof_count(cfg).sigma_dofs;
        try {
            const CfoslsSolution sol = solve_cfosls(cfg);
            row.J = sol.J.total;
            row.solver_seconds = sol.report.timings.solve + sol.report.timings.backsub;
            row.iterations = sol.report.iterations;
            const auto& eta = sol.J.per_element;
            if (sol.J.total > 0.0) {
                row.marked_fraction = static_cast<double>(doerfler_mark(eta.data(), {base.theta}).size()) / eta.size();
            }
            if (!sol.report.converged()) {
                row.ok = false;
                row.failure = sol.report.message;
            }
        } catch (const std::exception& e) {
            row.ok = false;
            row.failure = e.what();
        }
        rows.push_back(row);
        if (!row.ok) {
            break;
        }
    }
    return rows;
}

} // namespace spacetime
