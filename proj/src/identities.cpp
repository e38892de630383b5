// SPDX-License-Identifier: MIT
#include "spacetime/identities.hpp"

#include <algorithm>
#include <random>

namespace spacetime {

namespace {

Field random_field(Shape3 shape, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist{-1.0, 1.0};
    Field f{shape};
    for (std::size_t i = 0; i < f.size(); ++i) {
        f[i] = dist(rng);
    }
    return f;
}

double rel_dev(const Field& lhs, const Field& rhs) {
    const double scale = lhs.vec().lpNorm<Eigen::Infinity>();
    const double diff = (lhs.vec() - rhs.vec()).lpNorm<Eigen::Infinity>();
    return scale > 0.0 ? diff / scale : diff;
}

} // namespace

TrimFlags3 interior_tags() {
    return {{true, true}, {true, true}, {true, true}};
}

IdentityDeviations identity_deviations(const GlobalOperators& ops, int samples, unsigned seed) {
    std::mt19937_64 rng{seed};
    IdentityDeviations d;
    const Shape3 full = ops.mass.in_shape();
    const Shape3 phi = ops.mass_phi.in_shape();
    const TrimFlags3 inner = interior_tags();
    const Shape3 interior = inner.apply(full);
    for (int i = 0; i < samples; ++i) {
        const Field v = random_field(phi, rng);
        const Field kv = ops.k.apply(v);
        const Field lx = ops.l_x.apply_transpose(ops.solve_mass(ops.l_x.apply(v)));
        const Field ly = ops.l_y.apply_transpose(ops.solve_mass(ops.l_y.apply(v)));
        d.k = std::max(d.k, rel_dev(kv, lx + ly));

        const Field mv = ops.mass_phi.apply(v);
        const Field mm = ops.mass_phi_sigma.apply(ops.solve_mass(ops.mass_phi_sigma.apply_transpose(v)));
        d.mass = std::max(d.mass, rel_dev(mv, mm));

        if (interior.size() > 0) {
            const Field w = extend_field(random_field(interior, rng), inner, full);
            const Field stiff = restrict_field(ops.stiffness.apply(w), inner);
            const Field schur = restrict_field(ops.s.apply(w), inner);
            d.s = std::max(d.s, rel_dev(stiff, schur));
        }
    }
    return d;
}

IdentityDeviations identity_deviations(const ProblemConfig& config, int samples, unsigned seed) {
    const Discretization disc = make_discretization(config);
    return identity_deviations(build_operators(disc), samples, seed);
}

} // namespace spacetime
