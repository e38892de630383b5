// SPDX-License-Identifier: MIT
#include "spacetime/galerkin.hpp"

#include "spacetime/zoperator.hpp"

#include <chrono>

namespace spacetime {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Field as_field(Shape3 s, const Eigen::VectorXd& v) {
    return Field{s, std::vector<double>(v.data(), v.data() + v.size())};
}

} // namespace

GalerkinSolution solve_unstabilized(const ProblemConfig& config) {
    const auto t0 = Clock::now();
    const Discretization disc = make_discretization(config);
    const GlobalOperators ops = build_operators(disc);
    const LoadVector load = build_load_vector(disc, ops);
    const double setup = seconds_since(t0);
    GalerkinSolution sol = solve_unstabilized(disc, ops, load);
    sol.report.timings.assembly = setup;
    return sol;
}

GalerkinSolution solve_unstabilized(const Discretization& disc, const GlobalOperators& ops, const LoadVector& load) {
    const ProblemConfig& cfg = disc.config;
    const ZOperator z{ops};
    const Shape3 ps = disc.phi_shape();
    const TrimFlags3& tags = disc.tags.phi;

    GalerkinSolution sol;
    SolveReport& rep = sol.report;
    rep.solver = "galerkin";
    rep.dofs = dof_count(cfg);

    auto t0 = Clock::now();
    const Field rhs = restrict_field(load.f - z.apply_full(load.lifting), tags);
    LinearMap g{static_cast<Eigen::Index>(ps.size()), [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
                    const Field phi = extend_field(as_field(ps, v), tags, disc.full_shape());
                    return restrict_field(z.apply_full(phi), tags).vec();
                }};
    KrylovConfig kc;
    kc.tol = cfg.tol;
    kc.max_iterations = cfg.max_iterations;
    kc.restart = cfg.restart;
    auto res = gmres(g, rhs.vec(), Eigen::VectorXd::Zero(g.size), kc);
    rep.timings.solve = seconds_since(t0);
    rep.iterations = res.stats.iterations;
    rep.history = std::move(res.stats.history);
    rep.status = res.stats.status;
    rep.message = res.stats.message;

    t0 = Clock::now();
    sol.phi = as_field(ps, res.x);
    sol.phi_full = phi_with_lifting(disc, sol.phi, load.lifting);
    sol.sigma_x = ops.solve_mass(ops.l_x_full.apply(sol.phi_full));
    sol.sigma_y = ops.solve_mass(ops.l_y_full.apply(sol.phi_full));
    rep.timings.backsub = seconds_since(t0);
    rep.block_residual = galerkin_block_residual(disc, ops, load, sol);
    return sol;
}

double galerkin_block_residual(const Discretization& disc, const GlobalOperators& ops, const LoadVector& load,
                               const GalerkinSolution& sol) {
    const TrimFlags3& tags = disc.tags.phi;
    Field r1 = ops.adv_t.apply(sol.phi_full) + ops.adv_x.apply(sol.sigma_x) + ops.adv_y.apply(sol.sigma_y);
    r1 -= load.f;
    const Field row1 = restrict_field(r1, tags);
    Field r2 = ops.mass.apply(sol.sigma_x) - ops.l_x_full.apply(sol.phi_full);
    Field r3 = ops.mass.apply(sol.sigma_y) - ops.l_y_full.apply(sol.phi_full);
    // scale: the data moved to the right-hand side (source and lifted layer)
    const Field lifted = restrict_field(load.f - ZOperator{ops}.apply_full(load.lifting), tags);
    const double scale = std::max({lifted.norm(), ops.mass.apply(sol.sigma_x).norm() + ops.mass.apply(sol.sigma_y).norm(),
                                   1e-300});
    const double r = std::sqrt(row1.norm() * row1.norm() + r2.norm() * r2.norm() + r3.norm() * r3.norm());
    return r / scale;
}

} // namespace spacetime
