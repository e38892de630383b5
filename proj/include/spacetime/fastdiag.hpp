// SPDX-License-Identifier: MIT
#pragma once

#include "spacetime/tensor.hpp"

#include <optional>

namespace spacetime {

struct Index3 {
    int ix = 0;
    int iy = 0;
    int it = 0;
    friend bool operator==(const Index3&, const Index3&) = default;
};

/// Direct solver for S = Kx⊗My⊗Mt + Mx⊗Ky⊗Mt + Mx⊗My⊗Kt by per-direction generalized
/// eigendecompositions K u = d M u.
///
/// With a pin the solve acts on the complement of that dof: the pinned row of S is
/// dropped, the pinned coefficient of the result is 0. If S is singular its null space
/// must be one-dimensional and not vanish at the pin.
class FastDiagSolver {
public:
    FastDiagSolver(const FactorMatrix& kx, const FactorMatrix& mx, const FactorMatrix& ky,
                   const FactorMatrix& my, const FactorMatrix& kt, const FactorMatrix& mt,
                   std::optional<Index3> pin = std::nullopt);

    Shape3 shape() const noexcept { return shape_; }
    std::optional<Index3> pin() const noexcept { return pin_; }

    const Eigen::VectorXd& eigenvalues(Direction d) const { return values_[static_cast<int>(d)]; }
    /// M-orthonormal eigenvectors, one per column.
    const Eigen::MatrixXd& eigenvectors(Direction d) const { return vectors_[static_cast<int>(d)]; }

    /// Smallest eigenvalue of S relative to M (before pinning).
    double smallest_eigenvalue() const noexcept { return smallest_; }
    /// Number of eigenvalues treated as zero.
    int null_dimension() const noexcept { return null_dimension_; }

    /// S·v through the stored factors.
    Field apply(const Field& v) const;
    Field solve(const Field& rhs) const;

private:
    Field transform(const Field& v, bool transpose) const;
    // U D⁺ Uᵀ r
    Field solve_diagonal(const Field& r) const;

    Shape3 shape_;
    std::optional<Index3> pin_;
    std::array<FactorMatrix, 6> factors_;
    std::array<Eigen::VectorXd, 3> values_;
    std::array<Eigen::MatrixXd, 3> vectors_;
    Field inverse_diagonal_;
    double smallest_ = 0.0;
    int null_dimension_ = 0;
    // null vector (singular case) or S⁻¹ e_pin (regular case)
    Field correction_;
};

FastDiagSolver fastdiag_setup(const FactorMatrix& kx, const FactorMatrix& mx, const FactorMatrix& ky,
                              const FactorMatrix& my, const FactorMatrix& kt, const FactorMatrix& mt,
                              std::optional<Index3> pin = std::nullopt);

Field fastdiag_solve(const FastDiagSolver& solver, const Field& rhs);

} // namespace spacetime
