// SPDX-License-Identifier: MIT
#pragma once

#include "spacetime/assembly.hpp"

namespace spacetime {

/// Max relative deviations (‖Δ·v‖∞ / ‖lhs·v‖∞ over random v) of
///   K       vs  Σ L_αᵀ M⁻¹ L_α          on the φ space,
///   Kst     vs  Σ A_α M⁻¹ A_αᵀ          on the space trimmed at every boundary,
///   Mφ      vs  Mφσ M⁻¹ Mφσᵀ            on the φ space.
struct IdentityDeviations {
    double k = 0.0;
    double s = 0.0;
    double mass = 0.0;
};

IdentityDeviations identity_deviations(const GlobalOperators& ops, int samples = 20, unsigned seed = 1);
IdentityDeviations identity_deviations(const ProblemConfig& config, int samples = 20, unsigned seed = 1);

/// Trim flags removing both end layers in every direction.
TrimFlags3 interior_tags();

} // namespace spacetime
