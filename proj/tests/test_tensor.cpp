// SPDX-License-Identifier: MIT
#include "spacetime/error.hpp"
#include "spacetime/fastdiag.hpp"
#include "spacetime/tensor.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

#include <chrono>
#include <random>

using namespace spacetime;

namespace {

FactorMatrix factor(const Basis1D& b, FactorKind kind) {
    return assemble_factor(b, QuadratureRule1D{b, b.degree() + 1}, kind);
}

} // namespace

TEST_CASE("field indexing is x fastest") {
    Field f{{2, 3, 4}};
    CHECK(f.index(1, 0, 0) == 1);
    CHECK(f.index(0, 1, 0) == 2);
    CHECK(f.index(0, 0, 1) == 6);
    CHECK_THROWS_AS(Field({2, 2, 2}, std::vector<double>(7)), InputError);
    CHECK_THROWS_AS(Field({2, 2, 2}) += Field({2, 2, 3}), InputError);
}

TEST_CASE("kron_apply matches the dense Kronecker product") {
    std::mt19937 rng{1};
    for (auto [a, b, c] : {std::array{2, 2, 2}, std::array{3, 4, 5}}) {
        FactorMatrix fx{oracle::random_matrix(a, a + 1, rng)};
        FactorMatrix fy{oracle::random_matrix(b, b, rng)};
        FactorMatrix ft{oracle::random_matrix(c + 2, c, rng)};
        KronOperator3 op{fx, fy, ft, 0.7};
        auto v = oracle::random_field(op.in_shape(), rng);
        Eigen::VectorXd ref = oracle::dense(op) * v.vec();
        auto out = kron_apply(op, v);
        CHECK(out.shape() == op.out_shape());
        CHECK((out.vec() - ref).cwiseAbs().maxCoeff() < 1e-12);

        auto w = oracle::random_field(op.out_shape(), rng);
        CHECK(std::abs(dot(out, w) - dot(v, op.apply_transpose(w))) < 1e-12 * out.norm() * w.norm());
    }
}

TEST_CASE("kron_apply trivial cases and linearity") {
    std::mt19937 rng{2};
    Shape3 s{3, 4, 2};
    auto v = oracle::random_field(s, rng);
    KronOperator3 id{FactorMatrix::identity(3), FactorMatrix::identity(4), FactorMatrix::identity(2)};
    CHECK((kron_apply(id, v).vec() - v.vec()).norm() == 0.0);
    KronOperator3 zero{FactorMatrix::identity(3), FactorMatrix::identity(4), FactorMatrix::identity(2), 0.0};
    CHECK(kron_apply(zero, v).norm() == 0.0);

    KronOperator3 op{FactorMatrix{oracle::random_matrix(3, 3, rng)}, FactorMatrix{oracle::random_matrix(4, 4, rng)},
                     FactorMatrix{oracle::random_matrix(2, 2, rng)}};
    SumKron3 sum{{op, id}};
    auto w = oracle::random_field(s, rng);
    const double a = 0.3, b = -1.7;
    Field lhs = sum.apply(a * v + b * w);
    Field rhs = a * sum.apply(v) + b * sum.apply(w);
    CHECK((lhs.vec() - rhs.vec()).cwiseAbs().maxCoeff() < 1e-12 * rhs.vec().cwiseAbs().maxCoeff());
    Eigen::VectorXd ref = oracle::dense(sum) * v.vec();
    CHECK((sum.apply(v).vec() - ref).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(op.apply(Field{{2, 2, 2}}), InputError);
}

TEST_CASE("restrict and extend") {
    std::mt19937 rng{3};
    Shape3 full{5, 4, 3};
    TrimFlags3 flags{{true, true}, {true, true}, {true, false}};
    auto v = oracle::random_field(full, rng);
    auto r = restrict_field(v, flags);
    CHECK(r.shape() == Shape3{3, 2, 2});
    CHECK(r(0, 0, 0) == v(1, 1, 1));
    auto e = extend_field(r, flags, full);
    CHECK(e(0, 0, 0) == 0.0);
    CHECK(e(1, 1, 1) == v(1, 1, 1));
    CHECK((restrict_field(e, flags).vec() - r.vec()).norm() == 0.0);
}

TEST_CASE("banded cholesky") {
    auto b = make_basis(9, 3);
    auto m = factor(b, FactorKind::mass);
    auto c = BandedCholesky::factorize(m.values(), m.bandwidth());
    REQUIRE(c);
    std::mt19937 rng{4};
    Eigen::VectorXd rhs = oracle::random_matrix(m.rows(), 1, rng);
    Eigen::VectorXd x = rhs;
    c->solve_in_place(x.data(), 1);
    CHECK((m.values() * x - rhs).norm() < 1e-12 * rhs.norm() * 1e3);
    Eigen::MatrixXd ind = Eigen::MatrixXd::Identity(3, 3);
    ind(2, 2) = -1;
    CHECK_FALSE(BandedCholesky::factorize(ind, 0));
}

TEST_CASE("kron_solve against dense solve") {
    std::mt19937 rng{5};
    auto b = make_basis(4, 2);
    auto m = factor(b, FactorKind::mass);
    KronOperator3 op{m, m, m, 2.0};
    auto rhs = oracle::random_field(op.in_shape(), rng);
    Eigen::VectorXd ref = oracle::dense(op).lu().solve(rhs.vec());
    auto x = kron_solve(op, rhs);
    CHECK((x.vec() - ref).cwiseAbs().maxCoeff() < 1e-11 * ref.cwiseAbs().maxCoeff());
    CHECK((op.apply(x).vec() - rhs.vec()).norm() < 1e-10 * rhs.norm());

    // nonsymmetric factor takes the LU path
    auto a = factor(b, FactorKind::advection);
    FactorMatrix g{m.values() + 0.1 * a.values()};
    KronOperator3 op2{g, m, g};
    Eigen::VectorXd ref2 = oracle::dense(op2).lu().solve(rhs.vec());
    CHECK((kron_solve(op2, rhs).vec() - ref2).cwiseAbs().maxCoeff() < 1e-10 * ref2.cwiseAbs().maxCoeff());

    KronOperator3 id{FactorMatrix::identity(6), FactorMatrix::identity(6), FactorMatrix::identity(6)};
    CHECK((kron_solve(id, rhs).vec() - rhs.vec()).norm() == 0.0);

    FactorMatrix singular{Eigen::MatrixXd::Zero(6, 6)};
    try {
        kron_solve(KronOperator3{m, singular, m}, rhs);
        FAIL("expected singular factor error");
    } catch (const SolverError& e) {
        CHECK(std::string{e.what()}.find("direction y") != std::string::npos);
    }
}

TEST_CASE("fast diagonalization invariants") {
    auto b = make_basis(5, 2);
    auto m = factor(b, FactorKind::mass);
    auto k = factor(b, FactorKind::stiffness);
    auto kt = trim(k, {true, true}, {true, true});
    auto mt = trim(m, {true, true}, {true, true});
    FastDiagSolver s{kt, mt, kt, mt, kt, mt};
    for (auto d : {Direction::x, Direction::y, Direction::t}) {
        const auto& u = s.eigenvectors(d);
        Eigen::MatrixXd g = u.transpose() * mt.values() * u;
        Eigen::MatrixXd h = u.transpose() * kt.values() * u;
        CHECK((g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() < 1e-10);
        Eigen::MatrixXd dd = s.eigenvalues(d).asDiagonal();
        CHECK((h - dd).cwiseAbs().maxCoeff() < 1e-10 * s.eigenvalues(d).maxCoeff());
        CHECK(s.eigenvalues(d).minCoeff() > 0.0);
    }
    CHECK(s.null_dimension() == 0);
}

TEST_CASE("fast diagonalization with K = M reduces to the mass solve") {
    std::mt19937 rng{6};
    auto b = make_basis(4, 2);
    auto m = factor(b, FactorKind::mass);
    FastDiagSolver s{m, m, m, m, m, m};
    for (auto d : {Direction::x, Direction::y, Direction::t}) {
        CHECK((s.eigenvalues(d).array() - 1.0).abs().maxCoeff() < 1e-12);
    }
    auto rhs = oracle::random_field({6, 6, 6}, rng);
    auto x = s.solve(rhs);
    auto y = kron_solve(KronOperator3{m, m, m, 3.0}, rhs);
    CHECK((x.vec() - y.vec()).cwiseAbs().maxCoeff() < 1e-10 * y.vec().cwiseAbs().maxCoeff());
}

TEST_CASE("1D trimmed linear stiffness eigenvalues against dense generalized eig") {
    auto b = make_basis(3, 1);
    auto k = trim(factor(b, FactorKind::stiffness), {true, true}, {true, true});
    auto m = trim(factor(b, FactorKind::mass), {true, true}, {true, true});
    FastDiagSolver s{k, m, k, m, k, m};
    Eigen::MatrixXd dense = m.values().inverse() * k.values();
    Eigen::EigenSolver<Eigen::MatrixXd> es{dense};
    std::vector<double> ref;
    for (int i = 0; i < 2; ++i) ref.push_back(es.eigenvalues()[i].real());
    std::sort(ref.begin(), ref.end());
    for (int i = 0; i < 2; ++i) {
        CHECK(s.eigenvalues(Direction::x)[i] == doctest::Approx(ref[i]).epsilon(1e-12));
        CHECK(ref[i] > 0.0);
    }
}

namespace {

// S of the full (untrimmed) space: Ã = A M⁻¹ Aᵀ per direction has a one-dimensional kernel.
struct SingularCase {
    FactorMatrix kx, mx, ky, my, kt, mt;
};

SingularCase singular_case(int n, int p) {
    auto b = make_basis(n, p);
    auto m = factor(b, FactorKind::mass);
    auto a = factor(b, FactorKind::advection);
    Eigen::MatrixXd at = a.values() * m.values().llt().solve(a.values().transpose());
    at = 0.5 * (at + at.transpose()).eval();
    FactorMatrix k{at};
    return {k, m, k, m, k, m};
}

Eigen::MatrixXd pinned_dense(const Eigen::MatrixXd& s, Eigen::Index pin) {
    const Eigen::Index n = s.rows();
    Eigen::MatrixXd r(n - 1, n - 1);
    for (Eigen::Index i = 0, ii = 0; i < n; ++i) {
        if (i == pin) continue;
        for (Eigen::Index j = 0, jj = 0; j < n; ++j) {
            if (j == pin) continue;
            r(ii, jj++) = s(i, j);
        }
        ++ii;
    }
    return r;
}

Eigen::VectorXd drop(const Eigen::VectorXd& v, Eigen::Index pin) {
    Eigen::VectorXd r(v.size() - 1);
    for (Eigen::Index i = 0, k = 0; i < v.size(); ++i)
        if (i != pin) r[k++] = v[i];
    return r;
}

} // namespace

TEST_CASE("pinned solve on a singular space-time operator") {
    std::mt19937 rng{8};
    auto c = singular_case(2, 2);
    FastDiagSolver s{c.kx, c.mx, c.ky, c.my, c.kt, c.mt, Index3{0, 0, 0}};
    CHECK(s.null_dimension() == 1);
    CHECK(std::abs(s.smallest_eigenvalue()) < 1e-10);

    SumKron3 op{{KronOperator3{c.kx, c.my, c.mt}, KronOperator3{c.mx, c.ky, c.mt}, KronOperator3{c.mx, c.my, c.kt}}};
    Eigen::MatrixXd dense = oracle::dense(op);
    Eigen::MatrixXd reduced = pinned_dense(dense, 0);

    auto rhs = oracle::random_field({4, 4, 4}, rng);
    auto x = s.solve(rhs);
    CHECK(x[0] == 0.0);
    Eigen::VectorXd ref = reduced.lu().solve(drop(rhs.vec(), 0));
    CHECK((drop(x.vec(), 0) - ref).cwiseAbs().maxCoeff() < 1e-9 * ref.cwiseAbs().maxCoeff());

    // forward-apply round trip
    auto y = oracle::random_field({4, 4, 4}, rng);
    y[0] = 0.0;
    auto back = s.solve(s.apply(y));
    CHECK((back.vec() - y.vec()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(s.solve(Field{{4, 4, 4}}).norm() == 0.0);
}

TEST_CASE("pinned solve on a regular operator") {
    std::mt19937 rng{9};
    auto b = make_basis(3, 2);
    auto m = factor(b, FactorKind::mass);
    auto k = factor(b, FactorKind::stiffness);
    FactorMatrix kr{k.values() + m.values()};
    Index3 pin{1, 2, 0};
    FastDiagSolver s{kr, m, kr, m, kr, m, pin};
    CHECK(s.null_dimension() == 0);
    SumKron3 op{{KronOperator3{kr, m, m}, KronOperator3{m, kr, m}, KronOperator3{m, m, kr}}};
    const Eigen::Index p = Field{{5, 5, 5}}.index(1, 2, 0);
    Eigen::MatrixXd reduced = pinned_dense(oracle::dense(op), p);
    auto rhs = oracle::random_field({5, 5, 5}, rng);
    auto x = s.solve(rhs);
    CHECK(x[p] == 0.0);
    Eigen::VectorXd ref = reduced.lu().solve(drop(rhs.vec(), p));
    CHECK((drop(x.vec(), p) - ref).cwiseAbs().maxCoeff() < 1e-9 * ref.cwiseAbs().maxCoeff());
}

TEST_CASE("singular operator without pin is rejected") {
    auto c = singular_case(2, 1);
    FastDiagSolver s{c.kx, c.mx, c.ky, c.my, c.kt, c.mt};
    CHECK_THROWS_AS(s.solve(Field{s.shape()}), SolverError);
}

TEST_CASE("kron_solve cost grows roughly linearly") {
    auto run = [](int n) {
        auto b = make_basis(n, 2);
        auto m = factor(b, FactorKind::mass);
        KronOperator3 op{m, m, m};
        KronSolver solver{op};
        Field rhs{op.in_shape(), 1.0};
        const auto t0 = std::chrono::steady_clock::now();
        for (int r = 0; r < 5; ++r) rhs = solver.solve(rhs);
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    const double t8 = run(8);
    const double t16 = run(16);
    MESSAGE("kron_solve 8^3 -> 16^3 time ratio: " << t16 / t8);
}
