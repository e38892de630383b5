// SPDX-License-Identifier: MIT
#include "spacetime/cfosls.hpp"
#include "spacetime/error.hpp"
#include "spacetime/sampling.hpp"

#include "support/kkt_oracle.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <random>

using namespace spacetime;

namespace {

ProblemConfig make_config(int n, int p, double eps, double bx, double by) {
    ProblemConfig c;
    c.grid = {n, n, n};
    c.degree = p;
    c.eps = eps;
    c.beta = {bx, by};
    c.tol = 1e-12;
    c.max_iterations = 5000;
    c.restart = 0;
    return c;
}

struct Problem {
    Discretization disc;
    GlobalOperators ops;
    LoadVector load;
    explicit Problem(const ProblemConfig& c)
    : disc{make_discretization(c)}
    , ops{build_operators(disc)}
    , load{build_load_vector(disc, ops)} { }
};

double field_dev(const Field& f, const Eigen::VectorXd& ref) {
    return oracle::rel_dev(f.vec(), ref);
}

} // namespace

TEST_CASE("zero data gives the zero solution") {
    auto c = make_config(4, 2, 1e-2, 0.0, 0.3);
    c.initial = InitialKind::zero;
    const auto sol = solve_cfosls(c);
    for (const Field* f : {&sol.phi, &sol.sigma_star, &sol.sigma_x, &sol.sigma_y, &sol.lambda}) CHECK(f->norm() == 0.0);
    CHECK(sol.J.total == 0.0);
}

TEST_CASE("elimination matches the dense monolithic solve") {
    struct Regime {
        double eps, bx, by;
    };
    for (Regime r : {Regime{1.0, 0, 0}, Regime{1e-3, 0, 0.3}, Regime{1e-5, 0, 1.0}})
        for (int n : {3, 4})
            for (int p : {1, 2}) {
                CAPTURE(r.eps);
                CAPTURE(n);
                CAPTURE(p);
                auto c = make_config(n, p, r.eps, r.bx, r.by);
                c.source = SourceKind::manufactured;
                Problem pr{c};
                const auto ref = oracle::solve_kkt(pr.disc, pr.ops, pr.load);
                for (SchurSolverKind k : {SchurSolverKind::cg, SchurSolverKind::gmres, SchurSolverKind::gmres_uzawa}) {
                    CAPTURE(to_string(k));
                    pr.disc.config.schur_solver = k;
                    const auto sol = solve_cfosls(pr.disc, pr.ops, pr.load);
                    REQUIRE(sol.report.converged());
                    CHECK(field_dev(sol.phi, ref.phi) < 1e-7);
                    CHECK(field_dev(sol.sigma_star, ref.sigma_star) < 1e-7);
                    CHECK(field_dev(sol.sigma_x, ref.sigma_x) < 1e-7);
                    CHECK(field_dev(sol.sigma_y, ref.sigma_y) < 1e-7);
                    CHECK(field_dev(sol.lambda, ref.lambda) < 1e-7);
                    CHECK(sol.report.block_residual < 1e-9);
                }
            }
}

TEST_CASE("schur-only elimination drops the remainder and differs from the exact solve") {
    auto c = make_config(4, 2, 1e-2, 0.0, 0.3);
    const auto exact = solve_cfosls(c);
    c.elimination = EliminationKind::schur_only;
    const auto reduced = solve_cfosls(c);
    CHECK(reduced.report.converged());
    CHECK(oracle::rel_dev(reduced.phi.vec(), exact.phi.vec()) > 1e-8);
    CHECK(oracle::rel_dev(reduced.phi.vec(), exact.phi.vec()) < 0.5);
}

TEST_CASE("J against the quadrature oracle") {
    auto c = make_config(4, 1, 1e-2, 0.0, 0.3);
    c.final_time = 1.5;
    const auto sol = solve_cfosls(c);
    const Discretization disc = make_discretization(c);
    const double ref = oracle::dense_J(disc, sol.sigma_star.vec(), sol.sigma_x.vec(), sol.sigma_y.vec(),
                                       sol.phi_full.vec());
    CHECK(std::abs(sol.J.total - ref) < 1e-10 * std::max(1.0, ref));
    double sum = 0.0;
    for (std::size_t i = 0; i < sol.J.per_element.size(); ++i) {
        CHECK(sol.J.per_element[i] >= 0.0);
        sum += sol.J.per_element[i];
    }
    CHECK(std::abs(sum - sol.J.total) < 1e-12 * std::max(1.0, sol.J.total));
}

TEST_CASE("J on exact data") {
    const auto disc = make_discretization(make_config(3, 2, 0.1, 0.4, -0.7));
    const Shape3 s = disc.full_shape();
    const Field zero{s};
    // σ* = c, φ = 0: J = ½ c² |Ω_T|
    CHECK(compute_J(disc, Field{s, 0.3}, zero, zero, zero).total == doctest::Approx(0.5 * 0.09).epsilon(1e-13));
    // constant φ: ℒφ = βφ
    const double c = 1.7;
    const auto j = compute_J(disc, Field{s, c}, Field{s, 0.4 * c}, Field{s, -0.7 * c}, Field{s, c});
    CHECK(j.total < 1e-28);
    CHECK_THROWS_AS(compute_J(disc, Field{{2, 2, 2}}, zero, zero, zero), InputError);
}

TEST_CASE("constraint residual") {
    auto c = make_config(4, 1, 1e-2, 0.0, 0.3);
    Problem pr{c};
    const Shape3 s = pr.disc.full_shape();
    CHECK(constraint_residual(pr.ops, Field{s}, Field{s}, Field{s}, Field{s}) == 0.0);
    const auto sol = solve_cfosls(pr.disc, pr.ops, pr.load);
    CHECK(sol.constraint_residual < 1e-8);
    std::mt19937 rng{9};
    const double r = constraint_residual(pr.ops, oracle::random_field(s, rng), oracle::random_field(s, rng),
                                         oracle::random_field(s, rng), pr.load.f);
    CHECK(r > 1e-3);
}

TEST_CASE("Z adjoint consistency") {
    std::mt19937 rng{11};
    Problem pr{make_config(4, 2, 1e-3, 0.2, 0.3)};
    const ZOperator z{pr.ops};
    for (int k = 0; k < 5; ++k) {
        const auto phi = oracle::random_field(pr.disc.phi_shape(), rng);
        const auto lam = oracle::random_field(pr.disc.full_shape(), rng);
        const double a = dot(z.apply(phi), lam);
        const double b = dot(phi, z.apply_transpose(lam));
        CHECK(std::abs(a - b) < 1e-11 * std::max(1.0, std::abs(a)));
    }
}

TEST_CASE("Schur map is symmetric positive definite") {
    std::mt19937 rng{12};
    for (auto [eps, by] : {std::pair{1e-2, 0.3}, std::pair{1e-5, 1.0}}) {
        Problem pr{make_config(4, 2, eps, 0.0, by)};
        const UzawaSystem u{pr.disc, pr.ops};
        for (int k = 0; k < 20; ++k) {
            const auto a = oracle::random_field(u.phi_shape(), rng);
            const auto b = oracle::random_field(u.phi_shape(), rng);
            const double ab = dot(u.schur_apply(a), b);
            const double ba = dot(a, u.schur_apply(b));
            CHECK(std::abs(ab - ba) < 1e-10 * std::max(1.0, std::abs(ab)));
            CHECK(dot(u.schur_apply(a), a) > 0.0);
        }
        auto c = pr.disc.config;
        c.schur_solver = SchurSolverKind::cg;
        const auto sol = solve_cfosls(c);
        CHECK(sol.report.converged());
        CHECK(sol.report.negative_curvature_events == 0);
    }
}

TEST_CASE("solution minimizes J over the feasible set") {
    auto c = make_config(3, 1, 1e-2, 0.0, 0.3);
    c.source = SourceKind::manufactured;
    Problem pr{c};
    const auto sol = solve_cfosls(pr.disc, pr.ops, pr.load);
    const auto b = oracle::dense_blocks(pr.disc, pr.ops);
    // divergence-free σ perturbations: kernel of [A_t A_x A_y] without the pinned row
    const Eigen::Index n = b.n;
    Eigen::MatrixXd div(n - 1, 3 * n);
    div << b.at.bottomRows(n - 1), b.ax.bottomRows(n - 1), b.ay.bottomRows(n - 1);
    const Eigen::MatrixXd kernel = Eigen::FullPivLU<Eigen::MatrixXd>(div).kernel();
    REQUIRE(kernel.cols() > 0);

    std::mt19937 rng{13};
    std::normal_distribution<double> g;
    const Shape3 s = pr.disc.full_shape();
    for (int k = 0; k < 20; ++k) {
        Eigen::VectorXd coeff(kernel.cols());
        for (auto& v : coeff) v = g(rng);
        Eigen::VectorXd d = 1e-2 * kernel * coeff / std::max(1.0, (kernel * coeff).norm());
        Field dphi = extend_field(oracle::random_field(pr.disc.phi_shape(), rng), pr.disc.tags.phi, s);
        dphi *= 1e-2;
        auto perturbed = [&](const Field& f, Eigen::Index off) {
            Field out = f;
            for (Eigen::Index i = 0; i < n; ++i) out[i] += d[off + i];
            return out;
        };
        const double j = compute_J(pr.disc, perturbed(sol.sigma_star, 0), perturbed(sol.sigma_x, n),
                                   perturbed(sol.sigma_y, 2 * n), sol.phi_full + dphi)
                             .total;
        CHECK(j >= sol.J.total);
    }
}

TEST_CASE("sampling helpers") {
    auto c = make_config(4, 1, 1e-2, 0, 0);
    const auto disc = make_discretization(c);
    const Shape3 s = disc.full_shape();
    CHECK(undershoot(disc, Field{s, -0.2}) == doctest::Approx(0.2));
    std::mt19937 rng{14};
    Field pos = oracle::random_field(s, rng);
    for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = std::abs(pos[i]);
    CHECK(undershoot(disc, pos) == 0.0);
    const auto vals = evaluate_lattice(disc, Field{s, 1.0}, 8);
    CHECK(vals.shape() == Shape3{9, 9, 9});
    for (std::size_t i = 0; i < vals.size(); ++i) CHECK(vals[i] == doctest::Approx(1.0));
    const auto norms = slice_norms(disc, Field{s, 2.0}, 4);
    REQUIRE(norms.size() == 5);
    for (double v : norms) CHECK(v == doctest::Approx(2.0));
}
