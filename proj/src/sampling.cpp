// SPDX-License-Identifier: MIT
#include "spacetime/sampling.hpp"

#include "spacetime/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace spacetime {

namespace {

std::vector<double> lattice(int intervals) {
    std::vector<double> pts(intervals + 1);
    for (int k = 0; k <= intervals; ++k) {
        pts[k] = static_cast<double>(k) / intervals;
    }
    return pts;
}

void check_full(const Discretization& disc, const Field& c) {
    if (c.shape() != disc.full_shape()) {
        throw InputError{fmt::format("expected full-space coefficients of shape {}, got {}",
                                     to_string(disc.full_shape()), to_string(c.shape()))};
    }
}

} // namespace

Field evaluate_lattice(const Discretization& disc, const Field& coefficients, int intervals) {
    check_full(disc, coefficients);
    if (intervals < 1) {
        throw InputError{fmt::format("lattice needs at least one interval, got {}", intervals)};
    }
    const auto pts = lattice(intervals);
    KronOperator3 e{evaluation_matrix(disc.bases[0], pts), evaluation_matrix(disc.bases[1], pts),
                    evaluation_matrix(disc.bases[2], pts)};
    return e.apply(coefficients);
}

double evaluate_point(const Discretization& disc, const Field& coefficients, double x, double y, double t) {
    check_full(disc, coefficients);
    const auto vx = eval_basis(disc.bases[0], x);
    const auto vy = eval_basis(disc.bases[1], y);
    const auto vt = eval_basis(disc.bases[2], t / disc.lengths[2]);
    const int p = disc.config.degree;
    double s = 0.0;
    for (int k = 0; k <= p; ++k) {
        for (int j = 0; j <= p; ++j) {
            for (int i = 0; i <= p; ++i) {
                s += vx.values[i] * vy.values[j] * vt.values[k] *
                     coefficients(vx.first_dof + i, vy.first_dof + j, vt.first_dof + k);
            }
        }
    }
    return s;
}

double undershoot(const Discretization& disc, const Field& coefficients, int intervals) {
    const Field values = evaluate_lattice(disc, coefficients, intervals);
    return std::max(0.0, -values.vec().minCoeff());
}

std::vector<double> slice_norms(const Discretization& disc, const Field& coefficients, int intervals) {
    check_full(disc, coefficients);
    const auto pts = lattice(intervals);
    // spatial coefficients of every slice, then ‖u‖² = cᵀ (Mx ⊗ My) c
    const Field slices = apply_along(evaluation_matrix(disc.bases[2], pts).values(), Direction::t, coefficients);
    const KronOperator3 mass{assemble_factor(disc.bases[0], QuadratureRule1D{disc.bases[0], disc.config.degree + 1},
                                             FactorKind::mass),
                             assemble_factor(disc.bases[1], QuadratureRule1D{disc.bases[1], disc.config.degree + 1},
                                             FactorKind::mass),
                             FactorMatrix::identity(intervals + 1)};
    const Field weighted = mass.apply(slices);
    const std::size_t layer = std::size_t(slices.shape().nx) * slices.shape().ny;
    std::vector<double> norms(intervals + 1);
    for (int k = 0; k <= intervals; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < layer; ++i) {
            s += slices[k * layer + i] * weighted[k * layer + i];
        }
        norms[k] = std::sqrt(std::max(s, 0.0));
    }
    return norms;
}

Field phi_with_lifting(const Discretization& disc, const Field& phi, const Field& lifting) {
    Field full = extend_field(phi, disc.tags.phi, disc.full_shape());
    full += lifting;
    return full;
}

} // namespace spacetime
