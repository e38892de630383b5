// SPDX-License-Identifier: MIT
#pragma once

#include "spacetime/bspline.hpp"
#include "spacetime/config.hpp"
#include "spacetime/fastdiag.hpp"
#include "spacetime/tensor.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace spacetime {

/// Trim flags of the two kinds of spaces. φ drops the spatial boundary and the
/// initial time layer; σ and λ are the full tensor space.
struct SpaceTags {
    TrimFlags3 phi{{true, true}, {true, true}, {true, false}};
    TrimFlags3 sigma{};
};

/// 1D factors of one coordinate direction, all on the full (untrimmed) basis.
struct DirectionFactors {
    FactorMatrix mass;
    FactorMatrix advection;  // ∫ B_r B_c'
    FactorMatrix stiffness;  // ∫ B_r' B_c'
    FactorMatrix l_op;       // ∫ B_r (-eps B_c' + beta B_c)
    FactorMatrix ll_op;      // ∫ (-eps B_r' + beta B_r)(-eps B_c' + beta B_c)
    FactorMatrix adv_schur;  // A M⁻¹ Aᵀ
    TrimFlags phi_trim;
};

struct Discretization {
    ProblemConfig config;
    std::array<Basis1D, 3> bases;
    std::array<double, 3> lengths;
    SpaceTags tags;

    Shape3 full_shape() const;
    Shape3 phi_shape() const;
};

Discretization make_discretization(const ProblemConfig& config);

struct DofCounts {
    Shape3 full;
    Shape3 phi;
    std::size_t phi_dofs = 0;
    std::size_t sigma_dofs = 0;   // one σ component
    std::size_t lambda_dofs = 0;
    std::size_t total = 0;        // φ + three σ components + λ
};

DofCounts dof_count(const ProblemConfig& config);

/// Global operators as Kronecker products of 1D factors (x, y, t order).
///
/// Shapes: σ and λ live on the full space, φ on the trimmed one. Operators named
/// *_full take full-space inputs and are used for the lifted initial layer.
struct GlobalOperators {
    std::array<DirectionFactors, 3> factors;

    KronOperator3 mass;            // σ × σ
    KronOperator3 mass_phi;        // φ × φ
    KronOperator3 mass_phi_sigma;  // φ × σ
    KronOperator3 adv_t, adv_x, adv_y;  // λ × σ, derivative on σ
    KronOperator3 l_x, l_y;        // σ × φ
    KronOperator3 l_x_full, l_y_full;
    SumKron3 k;                    // φ × φ, (ℒ_x u, ℒ_x w) + (ℒ_y u, ℒ_y w)
    SumKron3 k_full;               // full × full
    SumKron3 stiffness;            // full space-time gradient stiffness Σ Kα ⊗ M ⊗ M
    SumKron3 s;                    // Σ A_α M⁻¹ A_αᵀ as a Kronecker sum
    SumKron3 k_remainder;          // K - Σ L_αᵀ M⁻¹ L_α on φ × φ
    std::shared_ptr<const KronSolver> mass_solver;
    std::shared_ptr<const FastDiagSolver> s_solver;
    double eigensetup_seconds = 0.0;

    Field solve_mass(const Field& v) const { return mass_solver->solve(v); }
};

GlobalOperators build_operators(const Discretization& disc);

/// Initial trace coefficients (spatial nx × ny) for u0.
Eigen::MatrixXd project_initial_condition(const Discretization& disc);

/// Evaluates the u0 preset at a point of (0,1)².
double initial_value(InitialKind kind, double x, double y);

/// f written as Σ fx(x) fy(y) ft(t).
struct SeparableTerm {
    std::function<double(double)> fx, fy, ft;
};
std::vector<SeparableTerm> source_terms(const ProblemConfig& config);
/// Pointwise source value.
double source_value(const ProblemConfig& config, double x, double y, double t);

/// Right-hand sides of the five block rows (σ*, σx, σy, λ, φ) including the lifted
/// initial layer.
struct LoadVector {
    Field f;        // (f, μ_j) over the λ space
    Field lifting;  // full-space coefficients of the known t = 0 layer
    Field g_star, g_x, g_y;  // σ rows
    Field g_phi;    // φ row
};

LoadVector build_load_vector(const Discretization& disc, const GlobalOperators& ops);

} // namespace spacetime
