// SPDX-License-Identifier: MIT
#pragma once

#include "spacetime/report.hpp"
#include "spacetime/sampling.hpp"
#include "spacetime/zoperator.hpp"

#include <array>

namespace spacetime {

/// Reduced system after eliminating σ*, σx, σy and λ:
///   (Zᵀ S⁻¹ Z + R) φ = g̃ + Zᵀ S⁻¹ f̃
/// with R = K - Σ L_αᵀ M⁻¹ L_α (dropped in the schur_only elimination mode). S⁻¹ is the
/// pinned fast-diagonalization solve.
class UzawaSystem {
public:
    UzawaSystem(const Discretization& disc, const GlobalOperators& ops);

    const ZOperator& z() const noexcept { return z_; }
    Shape3 phi_shape() const noexcept { return phi_shape_; }

    /// φ ↦ Zᵀ S⁻¹ Z φ
    Field schur_apply(const Field& phi) const;
    /// Schur map plus R when the elimination keeps it.
    Field reduced_apply(const Field& phi) const;
    LinearMap schur_map() const;
    LinearMap reduced_map() const;

private:
    const Discretization* disc_;
    const GlobalOperators* ops_;
    ZOperator z_;
    Shape3 phi_shape_;
};

struct JValue {
    double total = 0.0;
    Field per_element;  // shape (elements x, elements y, elements t)
};

/// J = ½‖σ - ℒφ‖² + ½‖σ* - φ‖² by element-wise Gauss quadrature (all fields full-space).
JValue compute_J(const Discretization& disc, const Field& sigma_star, const Field& sigma_x, const Field& sigma_y,
                 const Field& phi_full);

/// ‖A_t σ* + A_x σx + A_y σy - f‖ in the M⁻¹-weighted dual norm.
double constraint_residual(const GlobalOperators& ops, const Field& sigma_star, const Field& sigma_x,
                           const Field& sigma_y, const Field& f_load);

struct CfoslsSolution {
    Field phi;       // trimmed unknowns
    Field phi_full;  // with the lifted initial layer
    Field sigma_star, sigma_x, sigma_y;
    Field lambda;
    JValue J;
    double constraint_residual = 0.0;
    SolveReport report;
};

CfoslsSolution solve_cfosls(const ProblemConfig& config);
CfoslsSolution solve_cfosls(const Discretization& disc, const GlobalOperators& ops, const LoadVector& load);

/// Relative residuals of the five block rows (σ*, σx, σy, λ, φ) of the saddle-point
/// system; the λ row excludes the pinned dof.
std::array<double, 5> block_residuals(const Discretization& disc, const GlobalOperators& ops, const LoadVector& load,
                                      const CfoslsSolution& sol);

} // namespace spacetime
