// SPDX-License-Identifier: MIT
#include "spacetime/krylov.hpp"

#include "spacetime/error.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>

namespace spacetime {

namespace {

using Clock = std::chrono::steady_clock;

constexpr double reorthogonalization_threshold = 1e-10;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void check_sizes(const LinearMap& a, const Eigen::VectorXd& b, const Eigen::VectorXd& x0) {
    if (b.size() != a.size || x0.size() != a.size) {
        throw InputError{fmt::format("Krylov solve: operator size {}, rhs size {}, initial guess size {}", a.size,
                                     b.size(), x0.size())};
    }
}

void check_config(const KrylovConfig& cfg) {
    if (!(cfg.tol > 0.0) || cfg.abs_tol < 0.0 || cfg.max_iterations < 1 || cfg.restart < 0) {
        throw InputError{"invalid Krylov configuration"};
    }
}

// Orthogonalizes w against columns 0..j of v, writes coefficients to h(0..j).
void orthogonalize(const Eigen::MatrixXd& v, int j, Eigen::VectorXd& w, Eigen::Ref<Eigen::VectorXd> h,
                   GramSchmidt gs, bool reorthogonalize) {
    if (gs == GramSchmidt::classical) {
        h.head(j + 1) = v.leftCols(j + 1).transpose() * w;
        w.noalias() -= v.leftCols(j + 1) * h.head(j + 1);
        return;
    }
    for (int i = 0; i <= j; ++i) {
        h[i] = v.col(i).dot(w);
        w.noalias() -= h[i] * v.col(i);
    }
    if (!reorthogonalize) {
        return;
    }
    const double wn = w.norm();
    Eigen::VectorXd c = v.leftCols(j + 1).transpose() * w;
    if (c.cwiseAbs().maxCoeff() > reorthogonalization_threshold * wn) {
        for (int i = 0; i <= j; ++i) {
            const double d = v.col(i).dot(w);
            h[i] += d;
            w.noalias() -= d * v.col(i);
        }
    }
}

} // namespace

std::string_view to_string(KrylovStatus s) {
    switch (s) {
    case KrylovStatus::converged:
        return "converged";
    case KrylovStatus::max_iterations:
        return "max_iterations";
    case KrylovStatus::stagnated:
        return "stagnated";
    case KrylovStatus::indefinite:
        return "indefinite";
    }
    return "?";
}

LinearMap dense_map(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) {
        throw InputError{"dense_map needs a square matrix"};
    }
    return {a.rows(), [a](const Eigen::VectorXd& v) -> Eigen::VectorXd { return a * v; }};
}

KrylovResult gmres(const LinearMap& a, const Eigen::VectorXd& b, const Eigen::VectorXd& x0,
                   const KrylovConfig& cfg) {
    check_sizes(a, b, x0);
    check_config(cfg);
    const auto t0 = Clock::now();
    KrylovResult res{x0, {}};
    SolveStats& st = res.stats;

    Eigen::VectorXd r = b - a(res.x);
    double beta = r.norm();
    const double target = std::max(cfg.tol * b.norm(), cfg.abs_tol);
    st.history.push_back(beta);
    if (beta <= target) {
        st.status = KrylovStatus::converged;
        st.seconds = seconds_since(t0);
        return res;
    }

    const int m = cfg.restart > 0 ? std::min(cfg.restart, cfg.max_iterations) : cfg.max_iterations;
    const Eigen::Index n = a.size;
    Eigen::MatrixXd v(n, m + 1);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m + 1, m);
    Eigen::VectorXd cs(m), sn(m), g(m + 1);

    while (true) {
        const double cycle_start = beta;
        v.col(0) = r / beta;
        h.setZero();
        g.setZero();
        g[0] = beta;
        int k = 0;
        bool breakdown = false;
        for (int j = 0; j < m && st.iterations < cfg.max_iterations; ++j) {
            Eigen::VectorXd w = a(v.col(j));
            const double wn = w.norm();
            orthogonalize(v, j, w, h.col(j), cfg.orthogonalization, cfg.reorthogonalize);
            const double hn = w.norm();
            h(j + 1, j) = hn;
            for (int i = 0; i < j; ++i) {
                const double t = cs[i] * h(i, j) + sn[i] * h(i + 1, j);
                h(i + 1, j) = -sn[i] * h(i, j) + cs[i] * h(i + 1, j);
                h(i, j) = t;
            }
            const double d = std::hypot(h(j, j), h(j + 1, j));
            cs[j] = d > 0.0 ? h(j, j) / d : 1.0;
            sn[j] = d > 0.0 ? h(j + 1, j) / d : 0.0;
            h(j, j) = d;
            h(j + 1, j) = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] = cs[j] * g[j];
            ++st.iterations;
            k = j + 1;
            st.history.push_back(std::abs(g[j + 1]));
            // lucky breakdown: the Krylov space is invariant, the minimizer is exact
            if (hn <= 1e-13 * wn) {
                breakdown = true;
                break;
            }
            v.col(j + 1) = w / hn;
            if (std::abs(g[j + 1]) <= target) {
                break;
            }
        }
        const Eigen::VectorXd y =
            h.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
        res.x.noalias() += v.leftCols(k) * y;
        r = b - a(res.x);
        beta = r.norm();
        if (beta <= target || (breakdown && beta <= std::max(target, 1e-12 * b.norm()))) {
            st.status = KrylovStatus::converged;
            break;
        }
        if (st.iterations >= cfg.max_iterations) {
            st.status = KrylovStatus::max_iterations;
            break;
        }
        if (beta >= cycle_start * (1.0 - 1e-12) || breakdown) {
            st.status = KrylovStatus::stagnated;
            break;
        }
    }
    st.message = fmt::format("gmres {} after {} iterations, relative residual {:.3e}", to_string(st.status),
                             st.iterations, beta / std::max(b.norm(), 1e-300));
    st.seconds = seconds_since(t0);
    return res;
}

KrylovResult cg(const LinearMap& a, const Eigen::VectorXd& b, const Eigen::VectorXd& x0, const KrylovConfig& cfg) {
    check_sizes(a, b, x0);
    check_config(cfg);
    const auto t0 = Clock::now();
    KrylovResult res{x0, {}};
    SolveStats& st = res.stats;
    Eigen::VectorXd r = b - a(res.x);
    double rr = r.squaredNorm();
    const double target = std::max(cfg.tol * b.norm(), cfg.abs_tol);
    st.history.push_back(std::sqrt(rr));
    st.status = KrylovStatus::max_iterations;
    if (std::sqrt(rr) <= target) {
        st.status = KrylovStatus::converged;
    }
    Eigen::VectorXd p = r;
    while (st.status != KrylovStatus::converged && st.iterations < cfg.max_iterations) {
        const Eigen::VectorXd ap = a(p);
        const double curvature = p.dot(ap);
        if (!(curvature > 0.0)) {
            ++st.negative_curvature_events;
            st.status = KrylovStatus::indefinite;
            st.message = fmt::format("cg: nonpositive curvature {:.3e} at iteration {}", curvature, st.iterations);
            break;
        }
        const double alpha = rr / curvature;
        res.x.noalias() += alpha * p;
        r.noalias() -= alpha * ap;
        const double rr_new = r.squaredNorm();
        ++st.iterations;
        st.history.push_back(std::sqrt(rr_new));
        if (std::sqrt(rr_new) <= target) {
            st.status = KrylovStatus::converged;
            break;
        }
        p = r + (rr_new / rr) * p;
        rr = rr_new;
    }
    if (st.message.empty()) {
        st.message = fmt::format("cg {} after {} iterations, relative residual {:.3e}", to_string(st.status),
                                 st.iterations, st.history.back() / std::max(b.norm(), 1e-300));
    }
    st.seconds = seconds_since(t0);
    return res;
}

Eigen::MatrixXd arnoldi_basis(const LinearMap& a, const Eigen::VectorXd& v0, int steps, GramSchmidt gs,
                              bool reorthogonalize) {
    Eigen::MatrixXd v(a.size, steps + 1);
    Eigen::VectorXd h(steps + 1);
    v.col(0) = v0.normalized();
    for (int j = 0; j < steps; ++j) {
        Eigen::VectorXd w = a(v.col(j));
        orthogonalize(v, j, w, h, gs, reorthogonalize);
        const double hn = w.norm();
        if (hn == 0.0) {
            return v.leftCols(j + 1);
        }
        v.col(j + 1) = w / hn;
    }
    return v;
}

} // namespace spacetime
