// SPDX-License-Identifier: MIT
#include "spacetime/fastdiag.hpp"

#include "spacetime/error.hpp"

#include <fmt/format.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace spacetime {

namespace {

constexpr double null_tolerance = 1e-10;

void check_pair(const FactorMatrix& k, const FactorMatrix& m, const char* dir) {
    if (k.rows() != k.cols() || m.rows() != m.cols() || k.rows() != m.rows()) {
        throw InputError{fmt::format("fast diagonalization: factors in direction {} must be square and "
                                     "of equal size",
                                     dir)};
    }
    if (!m.is_symmetric(1e-12) || !k.is_symmetric(1e-10 * std::max(1.0, k.values().cwiseAbs().maxCoeff()))) {
        throw InputError{fmt::format("fast diagonalization: factors in direction {} must be symmetric", dir)};
    }
}

} // namespace

FastDiagSolver::FastDiagSolver(const FactorMatrix& kx, const FactorMatrix& mx, const FactorMatrix& ky,
                               const FactorMatrix& my, const FactorMatrix& kt, const FactorMatrix& mt,
                               std::optional<Index3> pin)
: shape_{kx.rows(), ky.rows(), kt.rows()}
, pin_{pin}
, factors_{kx, mx, ky, my, kt, mt} {
    check_pair(kx, mx, "x");
    check_pair(ky, my, "y");
    check_pair(kt, mt, "t");
    const char* names[] = {"x", "y", "t"};
    for (int d = 0; d < 3; ++d) {
        const Eigen::MatrixXd& k = factors_[2 * d].values();
        const Eigen::MatrixXd& m = factors_[2 * d + 1].values();
        if (Eigen::LLT<Eigen::MatrixXd>{m}.info() != Eigen::Success) {
            throw SolverError{fmt::format("fast diagonalization: mass factor in direction {} is not SPD",
                                          names[d])};
        }
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es{k, m};
        if (es.info() != Eigen::Success) {
            throw SolverError{fmt::format("fast diagonalization: eigensolver failed in direction {}",
                                          names[d])};
        }
        values_[d] = es.eigenvalues();
        vectors_[d] = es.eigenvectors();
    }
    if (pin_ && (pin_->ix < 0 || pin_->ix >= shape_.nx || pin_->iy < 0 || pin_->iy >= shape_.ny ||
                 pin_->it < 0 || pin_->it >= shape_.nt)) {
        throw InputError{fmt::format("pinned dof ({}, {}, {}) outside shape {}", pin_->ix, pin_->iy,
                                     pin_->it, to_string(shape_))};
    }

    Field lambda{shape_};
    double largest = 0.0;
    smallest_ = values_[0].minCoeff() + values_[1].minCoeff() + values_[2].minCoeff();
    for (int it = 0; it < shape_.nt; ++it) {
        for (int iy = 0; iy < shape_.ny; ++iy) {
            for (int ix = 0; ix < shape_.nx; ++ix) {
                const double l = values_[0][ix] + values_[1][iy] + values_[2][it];
                lambda(ix, iy, it) = l;
                largest = std::max(largest, std::abs(l));
            }
        }
    }
    inverse_diagonal_ = Field{shape_};
    Index3 null_mode{};
    for (int it = 0; it < shape_.nt; ++it) {
        for (int iy = 0; iy < shape_.ny; ++iy) {
            for (int ix = 0; ix < shape_.nx; ++ix) {
                const double l = lambda(ix, iy, it);
                if (l <= null_tolerance * largest) {
                    ++null_dimension_;
                    null_mode = {ix, iy, it};
                } else {
                    inverse_diagonal_(ix, iy, it) = 1.0 / l;
                }
            }
        }
    }

    if (null_dimension_ > 1 && pin_) {
        throw SolverError{fmt::format("space-time operator has a {}-dimensional null space; one pinned dof "
                                      "cannot remove it",
                                      null_dimension_)};
    }
    if (!pin_) {
        return;
    }
    const std::size_t p = std::size_t(pin_->ix) + std::size_t(shape_.nx) * (pin_->iy + std::size_t(shape_.ny) * pin_->it);
    if (null_dimension_ == 1) {
        Field e{shape_};
        e(null_mode.ix, null_mode.iy, null_mode.it) = 1.0;
        correction_ = transform(e, false);
        const double scale = correction_.vec().cwiseAbs().maxCoeff();
        if (std::abs(correction_[p]) <= 1e-10 * scale) {
            throw SolverError{"null vector of the space-time operator vanishes at the pinned dof"};
        }
    } else {
        Field e{shape_};
        e[p] = 1.0;
        correction_ = solve_diagonal(e);
    }
}

Field FastDiagSolver::transform(const Field& v, bool transpose) const {
    if (transpose) {
        Field out = apply_along(vectors_[0].transpose(), Direction::x, v);
        out = apply_along(vectors_[1].transpose(), Direction::y, out);
        return apply_along(vectors_[2].transpose(), Direction::t, out);
    }
    Field out = apply_along(vectors_[0], Direction::x, v);
    out = apply_along(vectors_[1], Direction::y, out);
    return apply_along(vectors_[2], Direction::t, out);
}

Field FastDiagSolver::solve_diagonal(const Field& r) const {
    Field w = transform(r, true);
    w.vec().array() *= inverse_diagonal_.vec().array();
    return transform(w, false);
}

Field FastDiagSolver::apply(const Field& v) const {
    if (v.shape() != shape_) {
        throw InputError{fmt::format("fast diagonalization apply: shape {} expected, got {}",
                                     to_string(shape_), to_string(v.shape()))};
    }
    const auto& [kx, mx, ky, my, kt, mt] = factors_;
    Field out = KronOperator3{kx, my, mt}.apply(v);
    out += KronOperator3{mx, ky, mt}.apply(v);
    out += KronOperator3{mx, my, kt}.apply(v);
    return out;
}

Field FastDiagSolver::solve(const Field& rhs) const {
    if (rhs.shape() != shape_) {
        throw InputError{fmt::format("fast diagonalization solve: shape {} expected, got {}",
                                     to_string(shape_), to_string(rhs.shape()))};
    }
    if (!pin_) {
        if (null_dimension_ > 0) {
            throw SolverError{"space-time operator is singular and no dof is pinned"};
        }
        return solve_diagonal(rhs);
    }
    const std::size_t p = rhs.index(pin_->ix, pin_->iy, pin_->it);
    if (null_dimension_ == 1) {
        // free multiplier on the dropped row makes the rhs compatible
        const Field& z = correction_;
        const double y = dot(z, rhs) / z[p];
        Field r = rhs;
        r[p] -= y;
        Field x = solve_diagonal(r);
        x.axpy(-x[p] / z[p], z);
        x[p] = 0.0;
        return x;
    }
    Field x = solve_diagonal(rhs);
    x.axpy(-x[p] / correction_[p], correction_);
    x[p] = 0.0;
    return x;
}

FastDiagSolver fastdiag_setup(const FactorMatrix& kx, const FactorMatrix& mx, const FactorMatrix& ky,
                              const FactorMatrix& my, const FactorMatrix& kt, const FactorMatrix& mt,
                              std::optional<Index3> pin) {
    return {kx, mx, ky, my, kt, mt, pin};
}

Field fastdiag_solve(const FastDiagSolver& solver, const Field& rhs) {
    return solver.solve(rhs);
}

} // namespace spacetime
