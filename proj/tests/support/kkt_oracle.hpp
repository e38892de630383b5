// SPDX-License-Identifier: MIT
// Dense monolithic reference solves of the stabilized and plain systems.
#pragma once

#include "spacetime/assembly.hpp"

#include "support/oracles.hpp"

#include <Eigen/Dense>

#include <vector>

namespace oracle {

struct DenseBlocks {
    Eigen::MatrixXd m, at, ax, ay, lx, ly, k, mass_plus_k;
    std::vector<Eigen::Index> phi_rows;  // full-space indices of the φ unknowns
    Eigen::Index n = 0;
};

inline DenseBlocks dense_blocks(const spacetime::Discretization& disc, const spacetime::GlobalOperators& ops) {
    const auto& [fx, fy, ft] = ops.factors;
    DenseBlocks b;
    b.m = dense_kron(fx.mass.values(), fy.mass.values(), ft.mass.values());
    b.at = dense_kron(fx.mass.values(), fy.mass.values(), ft.advection.values());
    b.ax = dense_kron(fx.advection.values(), fy.mass.values(), ft.mass.values());
    b.ay = dense_kron(fx.mass.values(), fy.advection.values(), ft.mass.values());
    b.lx = dense_kron(fx.l_op.values(), fy.mass.values(), ft.mass.values());
    b.ly = dense_kron(fx.mass.values(), fy.l_op.values(), ft.mass.values());
    b.k = dense_kron(fx.ll_op.values(), fy.mass.values(), ft.mass.values()) +
          dense_kron(fx.mass.values(), fy.ll_op.values(), ft.mass.values());
    b.mass_plus_k = b.m + b.k;
    const auto full = disc.full_shape();
    b.n = static_cast<Eigen::Index>(full.size());
    for (int it = 1; it < full.nt; ++it)
        for (int iy = 1; iy < full.ny - 1; ++iy)
            for (int ix = 1; ix < full.nx - 1; ++ix) b.phi_rows.push_back(ix + full.nx * (iy + full.ny * it));
    return b;
}

struct KktSolution {
    Eigen::VectorXd sigma_star, sigma_x, sigma_y, phi, lambda, phi_full;
};

/// Monolithic LU of the five-block system (σ*, σx, σy, φ, λ) with the λ dof at
/// index `pin` fixed to zero (its row and column removed).
inline KktSolution solve_kkt(const spacetime::Discretization& disc, const spacetime::GlobalOperators& ops,
                             const spacetime::LoadVector& load, Eigen::Index pin = 0) {
    const DenseBlocks b = dense_blocks(disc, ops);
    const Eigen::Index n = b.n;
    const Eigen::Index np = static_cast<Eigen::Index>(b.phi_rows.size());
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, np);  // φ ↦ full
    for (Eigen::Index j = 0; j < np; ++j) e(b.phi_rows[j], j) = 1.0;
    const Eigen::VectorXd g = load.lifting.vec();

    const Eigen::Index size = 3 * n + np + n;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(size, size);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(size);
    const Eigen::Index s0 = 0, s1 = n, s2 = 2 * n, p0 = 3 * n, l0 = 3 * n + np;
    // σ rows: M σ - (ℒ) φ_full + Aᵀ λ = 0
    a.block(s0, s0, n, n) = b.m;
    a.block(s0, p0, n, np) = -b.m * e;
    a.block(s0, l0, n, n) = b.at.transpose();
    rhs.segment(s0, n) = b.m * g;
    a.block(s1, s1, n, n) = b.m;
    a.block(s1, p0, n, np) = -b.lx * e;
    a.block(s1, l0, n, n) = b.ax.transpose();
    rhs.segment(s1, n) = b.lx * g;
    a.block(s2, s2, n, n) = b.m;
    a.block(s2, p0, n, np) = -b.ly * e;
    a.block(s2, l0, n, n) = b.ay.transpose();
    rhs.segment(s2, n) = b.ly * g;
    // φ rows: (M + K) φ_full - M σ* - Lᵀ σ = 0, tested on the φ space
    a.block(p0, s0, np, n) = -e.transpose() * b.m;
    a.block(p0, s1, np, n) = -e.transpose() * b.lx.transpose();
    a.block(p0, s2, np, n) = -e.transpose() * b.ly.transpose();
    a.block(p0, p0, np, np) = e.transpose() * b.mass_plus_k * e;
    rhs.segment(p0, np) = -e.transpose() * b.mass_plus_k * g;
    // constraint rows
    a.block(l0, s0, n, n) = b.at;
    a.block(l0, s1, n, n) = b.ax;
    a.block(l0, s2, n, n) = b.ay;
    rhs.segment(l0, n) = load.f.vec();

    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < size; ++i)
        if (i != l0 + pin) keep.push_back(i);
    const Eigen::VectorXd xr = a(keep, keep).partialPivLu().solve(rhs(keep));
    Eigen::VectorXd x = Eigen::VectorXd::Zero(size);
    x(keep) = xr;

    KktSolution s;
    s.sigma_star = x.segment(s0, n);
    s.sigma_x = x.segment(s1, n);
    s.sigma_y = x.segment(s2, n);
    s.phi = x.segment(p0, np);
    s.lambda = x.segment(l0, n);
    s.phi_full = e * s.phi + g;
    return s;
}

struct GalerkinReference {
    Eigen::VectorXd phi, sigma_x, sigma_y;
};

/// Dense solve of A_t φ + A_x σx + A_y σy = f (φ test rows), M σ - L φ = 0.
inline GalerkinReference solve_galerkin(const spacetime::Discretization& disc, const spacetime::GlobalOperators& ops,
                                        const spacetime::LoadVector& load) {
    const DenseBlocks b = dense_blocks(disc, ops);
    const Eigen::Index n = b.n;
    const Eigen::Index np = static_cast<Eigen::Index>(b.phi_rows.size());
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, np);
    for (Eigen::Index j = 0; j < np; ++j) e(b.phi_rows[j], j) = 1.0;
    const Eigen::VectorXd g = load.lifting.vec();
    const Eigen::Index size = np + 2 * n;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(size, size);
    Eigen::VectorXd rhs(size);
    a.block(0, 0, np, np) = e.transpose() * b.at * e;
    a.block(0, np, np, n) = e.transpose() * b.ax;
    a.block(0, np + n, np, n) = e.transpose() * b.ay;
    rhs.head(np) = e.transpose() * (load.f.vec() - b.at * g);
    a.block(np, 0, n, np) = -b.lx * e;
    a.block(np, np, n, n) = b.m;
    rhs.segment(np, n) = b.lx * g;
    a.block(np + n, 0, n, np) = -b.ly * e;
    a.block(np + n, np + n, n, n) = b.m;
    rhs.segment(np + n, n) = b.ly * g;
    const Eigen::VectorXd x = a.partialPivLu().solve(rhs);
    return {x.head(np), x.segment(np, n), x.segment(np + n, n)};
}

/// J by tensor Gauss quadrature with the Cox-de Boor recursion (unit box × (0,T)).
inline double dense_J(const spacetime::Discretization& disc, const Eigen::VectorXd& sigma_star,
                      const Eigen::VectorXd& sigma_x, const Eigen::VectorXd& sigma_y, const Eigen::VectorXd& phi_full) {
    const auto& cfg = disc.config;
    const int p = cfg.degree;
    auto [gx, gw] = golub_welsch(p + 3);
    std::array<Eigen::MatrixXd, 3> val, der;
    std::array<std::vector<double>, 3> wts;
    for (int d = 0; d < 3; ++d) {
        const int n = cfg.grid[d];
        const double len = disc.lengths[d];
        const auto k = clamped_knots(n, p);
        std::vector<double> nodes;
        for (int e = 0; e < n; ++e)
            for (std::size_t q = 0; q < gx.size(); ++q) {
                nodes.push_back((e + 0.5 * (gx[q] + 1.0)) / n);
                wts[d].push_back(0.5 * gw[q] / n * len);
            }
        val[d].resize(nodes.size(), n + p);
        der[d].resize(nodes.size(), n + p);
        for (std::size_t q = 0; q < nodes.size(); ++q)
            for (int i = 0; i < n + p; ++i) {
                val[d](q, i) = bspline(k, i, p, nodes[q]);
                der[d](q, i) = bspline_derivative(k, i, p, nodes[q]) / len;
            }
    }
    const Eigen::MatrixXd ev = dense_kron(val[0], val[1], val[2]);
    const Eigen::MatrixXd dx = dense_kron(der[0], val[1], val[2]);
    const Eigen::MatrixXd dy = dense_kron(val[0], der[1], val[2]);
    const Eigen::VectorXd phi = ev * phi_full;
    const Eigen::VectorXd r_star = ev * sigma_star - phi;
    const Eigen::VectorXd r_x = ev * sigma_x - (-cfg.eps * dx * phi_full + cfg.beta[0] * phi);
    const Eigen::VectorXd r_y = ev * sigma_y - (-cfg.eps * dy * phi_full + cfg.beta[1] * phi);
    double j = 0.0;
    Eigen::Index q = 0;
    for (double wt : wts[2])
        for (double wy : wts[1])
            for (double wx : wts[0]) {
                j += 0.5 * wx * wy * wt * (r_star[q] * r_star[q] + r_x[q] * r_x[q] + r_y[q] * r_y[q]);
                ++q;
            }
    return j;
}

} // namespace oracle
