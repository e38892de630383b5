// SPDX-License-Identifier: MIT
#include "spacetime/zoperator.hpp"

namespace spacetime {

ZOperator::ZOperator(const GlobalOperators& ops)
: ops_{&ops} { }

Field ZOperator::apply(const Field& phi) const {
    const GlobalOperators& o = *ops_;
    Field out = o.adv_t.apply(o.solve_mass(o.mass_phi_sigma.apply_transpose(phi)));
    out += o.adv_x.apply(o.solve_mass(o.l_x.apply(phi)));
    out += o.adv_y.apply(o.solve_mass(o.l_y.apply(phi)));
    return out;
}

Field ZOperator::apply_transpose(const Field& lambda) const {
    const GlobalOperators& o = *ops_;
    Field out = o.mass_phi_sigma.apply(o.solve_mass(o.adv_t.apply_transpose(lambda)));
    out += o.l_x.apply_transpose(o.solve_mass(o.adv_x.apply_transpose(lambda)));
    out += o.l_y.apply_transpose(o.solve_mass(o.adv_y.apply_transpose(lambda)));
    return out;
}

Field ZOperator::apply_full(const Field& phi_full) const {
    const GlobalOperators& o = *ops_;
    Field out = o.adv_t.apply(phi_full);
    out += o.adv_x.apply(o.solve_mass(o.l_x_full.apply(phi_full)));
    out += o.adv_y.apply(o.solve_mass(o.l_y_full.apply(phi_full)));
    return out;
}

} // namespace spacetime
