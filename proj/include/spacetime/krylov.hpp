// SPDX-License-Identifier: MIT
#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace spacetime {

/// Square matrix-free operator on coefficient vectors.
struct LinearMap {
    Eigen::Index size = 0;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> apply;

    Eigen::VectorXd operator()(const Eigen::VectorXd& v) const { return apply(v); }
};

LinearMap dense_map(const Eigen::MatrixXd& a);

enum class GramSchmidt { modified, classical };

struct KrylovConfig {
    int max_iterations = 1000;
    /// Krylov basis length per cycle; 0 means no restart.
    int restart = 0;
    double tol = 1e-8;       // relative to ‖b‖
    double abs_tol = 0.0;    // floor
    GramSchmidt orthogonalization = GramSchmidt::modified;
    /// Second Gram-Schmidt pass when orthogonality loss exceeds 1e-10 (ignored in classical mode).
    bool reorthogonalize = true;
};

enum class KrylovStatus { converged, max_iterations, stagnated, indefinite };

std::string_view to_string(KrylovStatus s);

struct SolveStats {
    int iterations = 0;
    /// Residual norm before the first and after every iteration.
    std::vector<double> history;
    KrylovStatus status = KrylovStatus::max_iterations;
    double seconds = 0.0;
    int negative_curvature_events = 0;
    std::string message;

    bool converged() const noexcept { return status == KrylovStatus::converged; }
};

struct KrylovResult {
    Eigen::VectorXd x;
    SolveStats stats;
};

/// Restarted GMRES: Arnoldi with Gram-Schmidt, Givens rotations for the small
/// least-squares problem, x = x0 + V y.
KrylovResult gmres(const LinearMap& a, const Eigen::VectorXd& b, const Eigen::VectorXd& x0,
                   const KrylovConfig& cfg);

/// Conjugate gradients; stops at the first direction with ⟨p, Ap⟩ ≤ 0.
KrylovResult cg(const LinearMap& a, const Eigen::VectorXd& b, const Eigen::VectorXd& x0,
                const KrylovConfig& cfg);

/// Arnoldi basis of the given length (for orthogonality checks); columns are V_0..V_k.
Eigen::MatrixXd arnoldi_basis(const LinearMap& a, const Eigen::VectorXd& v0, int steps,
                              GramSchmidt gs = GramSchmidt::modified, bool reorthogonalize = true);

} // namespace spacetime
