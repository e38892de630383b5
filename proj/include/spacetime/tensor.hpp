// SPDX-License-Identifier: MIT
#pragma once

#include "spacetime/bspline.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace spacetime {

/// Per-direction dof counts of a tensor-product space.
struct Shape3 {
    int nx = 0;
    int ny = 0;
    int nt = 0;

    std::size_t size() const noexcept { return std::size_t(nx) * ny * nt; }
    friend bool operator==(const Shape3&, const Shape3&) = default;
};

std::string to_string(const Shape3& s);

enum class Direction { x = 0, y = 1, t = 2 };

/// Coefficient tensor of one unknown over the space-time grid.
///
/// Storage order is x fastest, t slowest: index(ix, iy, it) = ix + nx * (iy + ny * it).
/// Under this vectorization, applying factors (Fx, Fy, Ft) equals multiplication by the
/// dense matrix kron(Ft, kron(Fy, Fx)) in the usual (left factor outermost) convention.
class Field {
public:
    Field() = default;
    explicit Field(Shape3 shape, double value = 0.0);
    Field(Shape3 shape, std::vector<double> data);

    const Shape3& shape() const noexcept { return shape_; }
    std::size_t size() const noexcept { return data_.size(); }

    double& operator()(int ix, int iy, int it) { return data_[index(ix, iy, it)]; }
    double operator()(int ix, int iy, int it) const { return data_[index(ix, iy, it)]; }
    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    std::size_t index(int ix, int iy, int it) const noexcept {
        return std::size_t(ix) + std::size_t(shape_.nx) * (std::size_t(iy) + std::size_t(shape_.ny) * it);
    }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    Eigen::Map<Eigen::VectorXd> vec() { return {data_.data(), static_cast<Eigen::Index>(data_.size())}; }
    Eigen::Map<const Eigen::VectorXd> vec() const {
        return {data_.data(), static_cast<Eigen::Index>(data_.size())};
    }

    Field& operator+=(const Field& other);
    Field& operator-=(const Field& other);
    Field& operator*=(double a);
    /// this += a * other
    Field& axpy(double a, const Field& other);

    double norm() const;

private:
    Shape3 shape_;
    std::vector<double> data_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double a, Field f);
double dot(const Field& a, const Field& b);

/// Per-direction trim flags of a tensor space.
struct TrimFlags3 {
    TrimFlags x;
    TrimFlags y;
    TrimFlags t;

    Shape3 apply(const Shape3& full) const {
        return {full.nx - x.removed(), full.ny - y.removed(), full.nt - t.removed()};
    }
    friend bool operator==(const TrimFlags3&, const TrimFlags3&) = default;
};

/// Drops the flagged boundary layers of a field.
Field restrict_field(const Field& full, const TrimFlags3& flags);
/// Zero extension of a trimmed field back to the full shape.
Field extend_field(const Field& trimmed, const TrimFlags3& flags, const Shape3& full);

/// weight * (Fx ⊗ Fy ⊗ Ft), applied by three directional sweeps.
class KronOperator3 {
public:
    KronOperator3() = default;
    KronOperator3(FactorMatrix fx, FactorMatrix fy, FactorMatrix ft, double weight = 1.0);

    const FactorMatrix& factor(Direction d) const { return factors_[static_cast<int>(d)]; }
    double weight() const noexcept { return weight_; }
    Shape3 in_shape() const;
    Shape3 out_shape() const;

    Field apply(const Field& v) const;
    /// Adjoint: weight * (Fxᵀ ⊗ Fyᵀ ⊗ Ftᵀ).
    Field apply_transpose(const Field& v) const;
    KronOperator3 transposed() const;

private:
    std::array<FactorMatrix, 3> factors_;
    double weight_ = 1.0;
};

/// Sum of Kronecker operators sharing input and output shapes.
class SumKron3 {
public:
    SumKron3() = default;
    explicit SumKron3(std::vector<KronOperator3> terms);

    const std::vector<KronOperator3>& terms() const noexcept { return terms_; }
    Shape3 in_shape() const;
    Shape3 out_shape() const;

    Field apply(const Field& v) const;
    Field apply_transpose(const Field& v) const;

private:
    std::vector<KronOperator3> terms_;
};

Field kron_apply(const KronOperator3& op, const Field& v);
Field kron_apply(const SumKron3& op, const Field& v);

/// Applies a single matrix along one direction of a field (the other directions untouched).
Field apply_along(const Eigen::MatrixXd& m, Direction d, const Field& v);

/// Cholesky factorization of a symmetric positive definite band matrix.
class BandedCholesky {
public:
    /// Returns std::nullopt when the matrix is not numerically positive definite.
    static std::optional<BandedCholesky> factorize(const Eigen::MatrixXd& m, int bandwidth);

    int size() const noexcept { return n_; }
    /// Solves in place for one right-hand side stored with the given stride.
    void solve_in_place(double* x, std::ptrdiff_t stride) const;

private:
    int n_ = 0;
    int bw_ = 0;
    // lower factor in band storage: l_[i * (bw + 1) + (i - j)] = L(i, j)
    std::vector<double> l_;
};

/// Direct solver for weight * (Fx ⊗ Fy ⊗ Ft) with square invertible factors:
/// three sequences of 1D solves, banded Cholesky for SPD factors and dense LU otherwise.
class KronSolver {
public:
    explicit KronSolver(const KronOperator3& op);

    Shape3 shape() const noexcept { return shape_; }
    Field solve(const Field& rhs) const;

private:
    using Factorization = std::variant<BandedCholesky, Eigen::PartialPivLU<Eigen::MatrixXd>>;

    Shape3 shape_;
    double weight_;
    std::array<Factorization, 3> factors_;
};

Field kron_solve(const KronOperator3& op, const Field& rhs);

} // namespace spacetime
