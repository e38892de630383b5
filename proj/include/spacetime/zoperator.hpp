// SPDX-License-Identifier: MIT
#pragma once

#include "spacetime/assembly.hpp"

namespace spacetime {

/// Z = A_t M⁻¹ Mφσᵀ + A_x M⁻¹ L_x + A_y M⁻¹ L_y, mapping φ-space to λ-space.
class ZOperator {
public:
    explicit ZOperator(const GlobalOperators& ops);

    Field apply(const Field& phi) const;
    Field apply_transpose(const Field& lambda) const;
    /// Z with the trial side on the full space (used for the lifted layer).
    Field apply_full(const Field& phi_full) const;

private:
    const GlobalOperators* ops_;
};

} // namespace spacetime
