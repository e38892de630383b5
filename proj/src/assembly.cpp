// SPDX-License-Identifier: MIT
#include "spacetime/assembly.hpp"

#include "spacetime/error.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

namespace spacetime {

namespace {

constexpr int data_quadrature_extra = 8;

FactorMatrix symmetrized(const Eigen::MatrixXd& m, FactorKind kind = FactorKind::derived) {
    return FactorMatrix{0.5 * (m + m.transpose()), kind};
}

// ∫_0^length fn(s) B_i(s / length) ds for every basis function
Eigen::VectorXd integrate_against_basis(const Basis1D& basis, double length,
                                        const std::function<double(double)>& fn) {
    QuadratureRule1D quad{basis, basis.degree() + data_quadrature_extra};
    Eigen::VectorXd out = Eigen::VectorXd::Zero(basis.dofs());
    const auto nodes = quad.all_nodes();
    const auto weights = quad.all_weights();
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const auto v = eval_basis(basis, nodes[k]);
        const double w = weights[k] * length * fn(length * nodes[k]);
        for (int i = 0; i <= basis.degree(); ++i) {
            out[v.first_dof + i] += w * v.values[i];
        }
    }
    return out;
}

} // namespace

Shape3 Discretization::full_shape() const {
    return {bases[0].dofs(), bases[1].dofs(), bases[2].dofs()};
}

Shape3 Discretization::phi_shape() const {
    return tags.phi.apply(full_shape());
}

Discretization make_discretization(const ProblemConfig& config) {
    config.validate();
    return Discretization{config,
                          {make_basis(config.grid[0], config.degree), make_basis(config.grid[1], config.degree),
                           make_basis(config.grid[2], config.degree)},
                          {1.0, 1.0, config.final_time},
                          SpaceTags{}};
}

DofCounts dof_count(const ProblemConfig& config) {
    const Discretization disc = make_discretization(config);
    DofCounts c;
    c.full = disc.full_shape();
    c.phi = disc.phi_shape();
    c.phi_dofs = c.phi.size();
    c.sigma_dofs = c.full.size();
    c.lambda_dofs = c.full.size();
    c.total = c.phi_dofs + 3 * c.sigma_dofs + c.lambda_dofs;
    return c;
}

GlobalOperators build_operators(const Discretization& disc) {
    const ProblemConfig& cfg = disc.config;
    GlobalOperators ops;
    for (int d = 0; d < 3; ++d) {
        const Basis1D& b = disc.bases[d];
        const double len = disc.lengths[d];
        QuadratureRule1D quad{b, b.degree() + 1};
        DirectionFactors& f = ops.factors[d];
        f.mass = assemble_factor(b, quad, FactorKind::mass, 0.0, 0.0, len);
        f.advection = assemble_factor(b, quad, FactorKind::advection, 0.0, 0.0, len);
        f.stiffness = assemble_factor(b, quad, FactorKind::stiffness, 0.0, 0.0, len);
        const Eigen::MatrixXd& m = f.mass.values();
        const Eigen::MatrixXd& a = f.advection.values();
        Eigen::LLT<Eigen::MatrixXd> mass_llt{m};
        f.adv_schur = symmetrized(a * mass_llt.solve(a.transpose()));
        if (d < 2) {
            const double beta = cfg.beta[d];
            f.l_op = assemble_factor(b, quad, FactorKind::l_operator, cfg.eps, beta, len);
            f.ll_op = symmetrized(cfg.eps * cfg.eps * f.stiffness.values() - cfg.eps * beta * (a + a.transpose()) +
                                  beta * beta * m);
        }
        f.phi_trim = d == 0 ? disc.tags.phi.x : d == 1 ? disc.tags.phi.y : disc.tags.phi.t;
    }
    const auto& [fx, fy, ft] = ops.factors;
    const TrimFlags none{};
    auto pp = [](const DirectionFactors& f, const FactorMatrix& m) { return trim(m, f.phi_trim, f.phi_trim); };
    auto ps = [&](const DirectionFactors& f, const FactorMatrix& m) { return trim(m, f.phi_trim, none); };
    auto sp = [&](const DirectionFactors& f, const FactorMatrix& m) { return trim(m, none, f.phi_trim); };

    ops.mass = {fx.mass, fy.mass, ft.mass};
    ops.mass_phi = {pp(fx, fx.mass), pp(fy, fy.mass), pp(ft, ft.mass)};
    ops.mass_phi_sigma = {ps(fx, fx.mass), ps(fy, fy.mass), ps(ft, ft.mass)};
    ops.adv_t = {fx.mass, fy.mass, ft.advection};
    ops.adv_x = {fx.advection, fy.mass, ft.mass};
    ops.adv_y = {fx.mass, fy.advection, ft.mass};
    ops.l_x = {sp(fx, fx.l_op), sp(fy, fy.mass), sp(ft, ft.mass)};
    ops.l_y = {sp(fx, fx.mass), sp(fy, fy.l_op), sp(ft, ft.mass)};
    ops.l_x_full = {fx.l_op, fy.mass, ft.mass};
    ops.l_y_full = {fx.mass, fy.l_op, ft.mass};
    ops.k = SumKron3{{{pp(fx, fx.ll_op), pp(fy, fy.mass), pp(ft, ft.mass)},
                      {pp(fx, fx.mass), pp(fy, fy.ll_op), pp(ft, ft.mass)}}};
    ops.k_full = SumKron3{{{fx.ll_op, fy.mass, ft.mass}, {fx.mass, fy.ll_op, ft.mass}}};
    ops.stiffness = SumKron3{{{fx.stiffness, fy.mass, ft.mass},
                              {fx.mass, fy.stiffness, ft.mass},
                              {fx.mass, fy.mass, ft.stiffness}}};
    ops.s = SumKron3{{{fx.adv_schur, fy.mass, ft.mass},
                      {fx.mass, fy.adv_schur, ft.mass},
                      {fx.mass, fy.mass, ft.adv_schur}}};

    auto remainder = [](const DirectionFactors& f) {
        const Eigen::MatrixXd& l = f.l_op.values();
        Eigen::MatrixXd r = f.ll_op.values() - l.transpose() * f.mass.values().llt().solve(l);
        return trim(symmetrized(r), f.phi_trim, f.phi_trim);
    };
    ops.k_remainder = SumKron3{{{remainder(fx), pp(fy, fy.mass), pp(ft, ft.mass)},
                                {pp(fx, fx.mass), remainder(fy), pp(ft, ft.mass)}}};

    ops.mass_solver = std::make_shared<const KronSolver>(ops.mass);
    const auto t0 = std::chrono::steady_clock::now();
    ops.s_solver = std::make_shared<const FastDiagSolver>(fx.adv_schur, fx.mass, fy.adv_schur, fy.mass,
                                                          ft.adv_schur, ft.mass, Index3{0, 0, 0});
    ops.eigensetup_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return ops;
}

double initial_value(InitialKind kind, double x, double y) {
    switch (kind) {
    case InitialKind::zero:
        return 0.0;
    case InitialKind::one:
        return 1.0;
    case InitialKind::bump: {
        const double r = 10.0 * std::hypot(x - 0.5, y - 0.5);
        return r <= 1.0 ? (1.0 - r * r) * (1.0 - r * r) : 0.0;
    }
    }
    return 0.0;
}

Eigen::MatrixXd project_initial_condition(const Discretization& disc) {
    const Basis1D& bx = disc.bases[0];
    const Basis1D& by = disc.bases[1];
    const InitialKind kind = disc.config.initial;
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(bx.dofs(), by.dofs());
    if (kind == InitialKind::zero) {
        return g;
    }
    if (disc.config.trace == TraceKind::greville) {
        const auto gx = bx.greville();
        const auto gy = by.greville();
        for (int j = 0; j < by.dofs(); ++j) {
            for (int i = 0; i < bx.dofs(); ++i) {
                g(i, j) = initial_value(kind, gx[i], gy[j]);
            }
        }
        return g;
    }
    QuadratureRule1D qx{bx, bx.degree() + data_quadrature_extra};
    QuadratureRule1D qy{by, by.degree() + data_quadrature_extra};
    auto ex = evaluation_matrix(bx, qx.all_nodes());
    auto ey = evaluation_matrix(by, qy.all_nodes());
    const auto nx = qx.all_nodes();
    const auto ny = qy.all_nodes();
    Eigen::MatrixXd values(nx.size(), ny.size());
    for (std::size_t j = 0; j < ny.size(); ++j) {
        for (std::size_t i = 0; i < nx.size(); ++i) {
            values(i, j) = initial_value(kind, nx[i], ny[j]) * qx.all_weights()[i] * qy.all_weights()[j];
        }
    }
    Eigen::MatrixXd rhs = ex.values().transpose() * values * ey.values();
    if (disc.config.trace == TraceKind::lumped) {
        // divide by ∫B_i ∫B_j (row sums of the mass matrices)
        const Eigen::VectorXd ix = integrate_against_basis(bx, 1.0, [](double) { return 1.0; });
        const Eigen::VectorXd iy = integrate_against_basis(by, 1.0, [](double) { return 1.0; });
        return ix.cwiseInverse().asDiagonal() * rhs * iy.cwiseInverse().asDiagonal();
    }
    auto mx = assemble_factor(bx, QuadratureRule1D{bx, bx.degree() + 1}, FactorKind::mass);
    auto my = assemble_factor(by, QuadratureRule1D{by, by.degree() + 1}, FactorKind::mass);
    Eigen::MatrixXd tmp = mx.values().llt().solve(rhs);
    return my.values().llt().solve(tmp.transpose()).transpose();
}

std::vector<SeparableTerm> source_terms(const ProblemConfig& config) {
    using std::numbers::pi;
    switch (config.source) {
    case SourceKind::zero:
        return {};
    case SourceKind::one: {
        auto one = [](double) { return 1.0; };
        return {{one, one, one}};
    }
    case SourceKind::manufactured: {
        // f for φ = sin(πx) sin(πy) t
        const double eps = config.eps;
        const double bx = config.beta[0];
        const double by = config.beta[1];
        auto s = [](double x) { return std::sin(pi * x); };
        auto c = [](double x) { return pi * std::cos(pi * x); };
        return {{s, s, [eps](double t) { return 1.0 + 2.0 * eps * pi * pi * t; }},
                {c, s, [bx](double t) { return bx * t; }},
                {s, c, [by](double t) { return by * t; }}};
    }
    }
    return {};
}

double source_value(const ProblemConfig& config, double x, double y, double t) {
    double f = 0.0;
    for (const auto& term : source_terms(config)) {
        f += term.fx(x) * term.fy(y) * term.ft(t);
    }
    return f;
}

LoadVector build_load_vector(const Discretization& disc, const GlobalOperators& ops) {
    const Shape3 full = disc.full_shape();
    LoadVector load;
    load.f = Field{full};
    for (const auto& term : source_terms(disc.config)) {
        const Eigen::VectorXd bx = integrate_against_basis(disc.bases[0], disc.lengths[0], term.fx);
        const Eigen::VectorXd by = integrate_against_basis(disc.bases[1], disc.lengths[1], term.fy);
        const Eigen::VectorXd bt = integrate_against_basis(disc.bases[2], disc.lengths[2], term.ft);
        for (int it = 0; it < full.nt; ++it) {
            for (int iy = 0; iy < full.ny; ++iy) {
                for (int ix = 0; ix < full.nx; ++ix) {
                    load.f(ix, iy, it) += bx[ix] * by[iy] * bt[it];
                }
            }
        }
    }

    const Eigen::MatrixXd trace = project_initial_condition(disc);
    load.lifting = Field{full};
    for (int iy = 0; iy < full.ny; ++iy) {
        for (int ix = 0; ix < full.nx; ++ix) {
            load.lifting(ix, iy, 0) = trace(ix, iy);
        }
    }
    load.g_star = ops.mass.apply(load.lifting);
    load.g_x = ops.l_x_full.apply(load.lifting);
    load.g_y = ops.l_y_full.apply(load.lifting);
    Field phi_row = load.g_star + ops.k_full.apply(load.lifting);
    load.g_phi = restrict_field(phi_row, disc.tags.phi);
    load.g_phi *= -1.0;
    return load;
}

} // namespace spacetime
