// SPDX-License-Identifier: MIT
#pragma once

#include "spacetime/assembly.hpp"

#include <vector>

namespace spacetime {

constexpr int default_lattice_intervals = 32;

/// Values of the B-spline expansion with full-space coefficients at the uniform
/// (s+1)³ lattice of the space-time box. Output is indexed like a Field (x fastest).
Field evaluate_lattice(const Discretization& disc, const Field& coefficients,
                       int intervals = default_lattice_intervals);

/// Value of the expansion at one point (t in [0, T]).
double evaluate_point(const Discretization& disc, const Field& coefficients, double x, double y, double t);

/// max(0, -min) over the (s+1)³ lattice.
double undershoot(const Discretization& disc, const Field& coefficients,
                  int intervals = default_lattice_intervals);

/// Spatial L2 norms of the expansion at t_k = k T / s, k = 0..s.
std::vector<double> slice_norms(const Discretization& disc, const Field& coefficients,
                                int intervals = default_lattice_intervals);

/// Full-space coefficients of φ: zero extension plus the lifted initial layer.
Field phi_with_lifting(const Discretization& disc, const Field& phi, const Field& lifting);

} // namespace spacetime
