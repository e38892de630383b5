// SPDX-License-Identifier: MIT
#include "spacetime/cfosls.hpp"

#include "spacetime/error.hpp"

#include <fmt/format.h>

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

std::size_t pin_index(const GlobalOperators& ops, Shape3 full) {
    const Index3 p = ops.s_solver->pin().value_or(Index3{});
    return std::size_t(p.ix) + std::size_t(full.nx) * (p.iy + std::size_t(full.ny) * p.it);
}

KrylovConfig krylov_config(const ProblemConfig& cfg) {
    KrylovConfig kc;
    kc.tol = cfg.tol;
    kc.max_iterations = cfg.max_iterations;
    kc.restart = cfg.restart;
    return kc;
}

} // namespace

UzawaSystem::UzawaSystem(const Discretization& disc, const GlobalOperators& ops)
: disc_{&disc}
, ops_{&ops}
, z_{ops}
, phi_shape_{disc.phi_shape()} { }

Field UzawaSystem::schur_apply(const Field& phi) const {
    return z_.apply_transpose(ops_->s_solver->solve(z_.apply(phi)));
}

Field UzawaSystem::reduced_apply(const Field& phi) const {
    Field out = schur_apply(phi);
    if (disc_->config.elimination == EliminationKind::exact) {
        out += ops_->k_remainder.apply(phi);
    }
    return out;
}

LinearMap UzawaSystem::schur_map() const {
    return {static_cast<Eigen::Index>(phi_shape_.size()),
            [this](const Eigen::VectorXd& v) -> Eigen::VectorXd { return schur_apply(as_field(phi_shape_, v)).vec(); }};
}

LinearMap UzawaSystem::reduced_map() const {
    return {static_cast<Eigen::Index>(phi_shape_.size()),
            [this](const Eigen::VectorXd& v) -> Eigen::VectorXd { return reduced_apply(as_field(phi_shape_, v)).vec(); }};
}

JValue compute_J(const Discretization& disc, const Field& sigma_star, const Field& sigma_x, const Field& sigma_y,
                 const Field& phi_full) {
    const Shape3 full = disc.full_shape();
    for (const Field* f : {&sigma_star, &sigma_x, &sigma_y, &phi_full}) {
        if (f->shape() != full) {
            throw InputError{fmt::format("compute_J expects full-space fields of shape {}, got {}", to_string(full),
                                         to_string(f->shape()))};
        }
    }
    const int q = disc.config.degree + 1;
    std::array<QuadratureRule1D, 3> quad{QuadratureRule1D{disc.bases[0], q}, QuadratureRule1D{disc.bases[1], q},
                                         QuadratureRule1D{disc.bases[2], q}};
    std::array<FactorMatrix, 3> e, d;
    for (int k = 0; k < 3; ++k) {
        e[k] = evaluation_matrix(disc.bases[k], quad[k].all_nodes());
        d[k] = evaluation_matrix(disc.bases[k], quad[k].all_nodes(), true);
    }
    // derivatives w.r.t. physical coordinates; x and y live on unit intervals
    const KronOperator3 values{e[0], e[1], e[2]};
    const KronOperator3 dx{FactorMatrix{d[0].values() / disc.lengths[0]}, e[1], e[2]};
    const KronOperator3 dy{e[0], FactorMatrix{d[1].values() / disc.lengths[1]}, e[2]};

    const Field phi = values.apply(phi_full);
    const Field phi_x = dx.apply(phi_full);
    const Field phi_y = dy.apply(phi_full);
    const Field s_star = values.apply(sigma_star);
    const Field s_x = values.apply(sigma_x);
    const Field s_y = values.apply(sigma_y);

    const double eps = disc.config.eps;
    const auto [bx, by] = disc.config.beta;
    const Shape3 qs = phi.shape();
    JValue j;
    j.per_element = Field{{disc.bases[0].elements(), disc.bases[1].elements(), disc.bases[2].elements()}};
    for (int it = 0; it < qs.nt; ++it) {
        const double wt = quad[2].all_weights()[it] * disc.lengths[2];
        for (int iy = 0; iy < qs.ny; ++iy) {
            const double wy = quad[1].all_weights()[iy] * disc.lengths[1];
            for (int ix = 0; ix < qs.nx; ++ix) {
                const double w = quad[0].all_weights()[ix] * disc.lengths[0] * wy * wt;
                const std::size_t k = phi.index(ix, iy, it);
                const double rx = s_x[k] - (-eps * phi_x[k] + bx * phi[k]);
                const double ry = s_y[k] - (-eps * phi_y[k] + by * phi[k]);
                const double rs = s_star[k] - phi[k];
                j.per_element(ix / q, iy / q, it / q) += 0.5 * w * (rx * rx + ry * ry + rs * rs);
            }
        }
    }
    for (std::size_t k = 0; k < j.per_element.size(); ++k) {
        j.total += j.per_element[k];
    }
    return j;
}

double constraint_residual(const GlobalOperators& ops, const Field& sigma_star, const Field& sigma_x,
                           const Field& sigma_y, const Field& f_load) {
    Field r = ops.adv_t.apply(sigma_star) + ops.adv_x.apply(sigma_x) + ops.adv_y.apply(sigma_y);
    r -= f_load;
    return std::sqrt(std::max(0.0, dot(r, ops.solve_mass(r))));
}

CfoslsSolution solve_cfosls(const ProblemConfig& config) {
    auto t0 = Clock::now();
    const Discretization disc = make_discretization(config);
    const GlobalOperators ops = build_operators(disc);
    const LoadVector load = build_load_vector(disc, ops);
    const double setup = seconds_since(t0);
    CfoslsSolution sol = solve_cfosls(disc, ops, load);
    sol.report.timings.eigensetup = ops.eigensetup_seconds;
    sol.report.timings.assembly = setup - ops.eigensetup_seconds;
    return sol;
}

CfoslsSolution solve_cfosls(const Discretization& disc, const GlobalOperators& ops, const LoadVector& load) {
    const ProblemConfig& cfg = disc.config;
    const Shape3 full = disc.full_shape();
    const TrimFlags3& tags = disc.tags.phi;
    const UzawaSystem uzawa{disc, ops};
    const ZOperator& z = uzawa.z();
    const FastDiagSolver& s = *ops.s_solver;

    CfoslsSolution sol;
    SolveReport& rep = sol.report;
    rep.solver = fmt::format("cfosls-{}-{}", to_string(cfg.schur_solver), to_string(cfg.elimination));
    rep.dofs = dof_count(cfg);
    rep.smallest_s_eigenvalue = s.smallest_eigenvalue();
    rep.s_null_dimension = s.null_dimension();

    auto t0 = Clock::now();
    // eliminated right-hand sides
    const Field m_g1 = ops.solve_mass(load.g_star);
    const Field m_g2 = ops.solve_mass(load.g_x);
    const Field m_g3 = ops.solve_mass(load.g_y);
    Field f_tilde = load.f;
    f_tilde -= ops.adv_t.apply(m_g1);
    f_tilde -= ops.adv_x.apply(m_g2);
    f_tilde -= ops.adv_y.apply(m_g3);
    Field g_tilde = load.g_phi;
    g_tilde += ops.mass_phi_sigma.apply(m_g1);
    g_tilde += ops.l_x.apply_transpose(m_g2);
    g_tilde += ops.l_y.apply_transpose(m_g3);

    const KrylovConfig kc = krylov_config(cfg);
    const Shape3 ps = disc.phi_shape();
    if (cfg.schur_solver == SchurSolverKind::gmres_uzawa) {
        // [-S Z; Zᵀ R] [λ; φ] = [f̃; g̃] with the pinned λ dof removed
        const std::size_t pin = pin_index(ops, full);
        const Eigen::Index nl = static_cast<Eigen::Index>(full.size()) - 1;
        const Eigen::Index np = static_cast<Eigen::Index>(ps.size());
        auto lambda_of = [&](const Eigen::VectorXd& v) {
            Field l{full};
            for (Eigen::Index i = 0, k = 0; i < static_cast<Eigen::Index>(full.size()); ++i) {
                if (static_cast<std::size_t>(i) != pin) l[i] = v[k++];
            }
            return l;
        };
        auto drop_pin = [&](const Field& l, Eigen::Ref<Eigen::VectorXd> out) {
            for (Eigen::Index i = 0, k = 0; i < static_cast<Eigen::Index>(full.size()); ++i) {
                if (static_cast<std::size_t>(i) != pin) out[k++] = l[i];
            }
        };
        LinearMap block{nl + np, [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
                            const Field l = lambda_of(v.head(nl));
                            const Field phi = as_field(ps, v.tail(np));
                            Eigen::VectorXd out(nl + np);
                            Field top = z.apply(phi);
                            top -= s.apply(l);
                            drop_pin(top, out.head(nl));
                            Field bottom = z.apply_transpose(l);
                            if (cfg.elimination == EliminationKind::exact) {
                                bottom += ops.k_remainder.apply(phi);
                            }
                            out.tail(np) = bottom.vec();
                            return out;
                        }};
        Eigen::VectorXd rhs(nl + np);
        drop_pin(f_tilde, rhs.head(nl));
        rhs.tail(np) = g_tilde.vec();
        auto res = gmres(block, rhs, Eigen::VectorXd::Zero(nl + np), kc);
        sol.phi = as_field(ps, res.x.tail(np));
        rep.iterations = res.stats.iterations;
        rep.history = std::move(res.stats.history);
        rep.status = res.stats.status;
        rep.message = res.stats.message;
    } else {
        Field rhs = g_tilde;
        rhs += z.apply_transpose(s.solve(f_tilde));
        const LinearMap a = uzawa.reduced_map();
        auto res = cfg.schur_solver == SchurSolverKind::cg ? cg(a, rhs.vec(), Eigen::VectorXd::Zero(a.size), kc)
                                                          : gmres(a, rhs.vec(), Eigen::VectorXd::Zero(a.size), kc);
        sol.phi = as_field(ps, res.x);
        rep.iterations = res.stats.iterations;
        rep.history = std::move(res.stats.history);
        rep.status = res.stats.status;
        rep.message = res.stats.message;
        rep.negative_curvature_events = res.stats.negative_curvature_events;
    }
    rep.timings.solve = seconds_since(t0);

    t0 = Clock::now();
    Field zphi = z.apply(sol.phi);
    zphi -= f_tilde;
    sol.lambda = s.solve(zphi);
    const Field phi_ext = extend_field(sol.phi, tags, full);
    sol.sigma_star = ops.solve_mass(load.g_star + ops.mass.apply(phi_ext) - ops.adv_t.apply_transpose(sol.lambda));
    sol.sigma_x = ops.solve_mass(load.g_x + ops.l_x.apply(sol.phi) - ops.adv_x.apply_transpose(sol.lambda));
    sol.sigma_y = ops.solve_mass(load.g_y + ops.l_y.apply(sol.phi) - ops.adv_y.apply_transpose(sol.lambda));
    sol.phi_full = phi_with_lifting(disc, sol.phi, load.lifting);
    rep.timings.backsub = seconds_since(t0);

    sol.J = compute_J(disc, sol.sigma_star, sol.sigma_x, sol.sigma_y, sol.phi_full);
    sol.constraint_residual = constraint_residual(ops, sol.sigma_star, sol.sigma_x, sol.sigma_y, load.f);
    rep.J = sol.J.total;
    rep.constraint_residual = sol.constraint_residual;
    const auto br = block_residuals(disc, ops, load, sol);
    rep.block_residual = *std::max_element(br.begin(), br.end());
    return sol;
}

std::array<double, 5> block_residuals(const Discretization& disc, const GlobalOperators& ops, const LoadVector& load,
                                      const CfoslsSolution& sol) {
    const Shape3 full = disc.full_shape();
    const Field phi_ext = extend_field(sol.phi, disc.tags.phi, full);
    auto rel = [](const Field& r, double scale) { return scale > 0.0 ? r.norm() / scale : r.norm(); };

    std::array<double, 5> out{};
    {
        const Field a = ops.mass.apply(sol.sigma_star);
        const Field b = ops.adv_t.apply_transpose(sol.lambda);
        const Field c = ops.mass_phi_sigma.apply_transpose(sol.phi);
        out[0] = rel(a + b - c - load.g_star, a.norm() + b.norm() + c.norm() + load.g_star.norm());
    }
    {
        const Field a = ops.mass.apply(sol.sigma_x);
        const Field b = ops.adv_x.apply_transpose(sol.lambda);
        const Field c = ops.l_x.apply(sol.phi);
        out[1] = rel(a + b - c - load.g_x, a.norm() + b.norm() + c.norm() + load.g_x.norm());
    }
    {
        const Field a = ops.mass.apply(sol.sigma_y);
        const Field b = ops.adv_y.apply_transpose(sol.lambda);
        const Field c = ops.l_y.apply(sol.phi);
        out[2] = rel(a + b - c - load.g_y, a.norm() + b.norm() + c.norm() + load.g_y.norm());
    }
    {
        const Field a = ops.adv_t.apply(sol.sigma_star);
        const Field b = ops.adv_x.apply(sol.sigma_x);
        const Field c = ops.adv_y.apply(sol.sigma_y);
        Field r = a + b + c - load.f;
        r[pin_index(ops, full)] = 0.0;
        out[3] = rel(r, a.norm() + b.norm() + c.norm() + load.f.norm());
    }
    {
        const Field a = ops.mass_phi_sigma.apply(sol.sigma_star);
        const Field b = ops.l_x.apply_transpose(sol.sigma_x) + ops.l_y.apply_transpose(sol.sigma_y);
        const Field c = ops.mass_phi.apply(sol.phi) + ops.k.apply(sol.phi);
        out[4] = rel(c - a - b - load.g_phi, a.norm() + b.norm() + c.norm() + load.g_phi.norm());
    }
    return out;
}

} // namespace spacetime
