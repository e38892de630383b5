// SPDX-License-Identifier: MIT
#pragma once

#include <Eigen/Dense>

#include <span>
#include <utility>
#include <vector>

namespace spacetime {

/// Clamped B-spline basis of degree p on the uniform partition of [0,1] into n elements.
///
/// The knot vector has p+1 repeated knots at each end and interior knots i/n,
/// giving n + p basis functions. Basis function i is supported on the knot
/// span [knots[i], knots[i+p+1]].
class Basis1D {
public:
    Basis1D(int elements, int degree);

    int degree() const noexcept { return degree_; }
    int elements() const noexcept { return elements_; }
    int dofs() const noexcept { return elements_ + degree_; }
    std::span<const double> knots() const noexcept { return knots_; }

    double element_begin(int e) const noexcept { return knots_[degree_ + e]; }
    double element_end(int e) const noexcept { return knots_[degree_ + e + 1]; }

    /// Element containing x; the right end point belongs to the last element.
    int find_element(double x) const;

    /// Greville abscissae: averages of p consecutive interior knots.
    std::vector<double> greville() const;

private:
    int elements_;
    int degree_;
    std::vector<double> knots_;
};

Basis1D make_basis(int elements, int degree);

/// Nonzero basis functions at a point: dofs first_dof .. first_dof + p.
struct BasisValues {
    int first_dof = 0;
    std::vector<double> values;
    std::vector<double> derivatives;
};

/// Cox-de Boor evaluation of the p+1 nonzero functions and their first derivatives.
BasisValues eval_basis(const Basis1D& basis, double x);

/// Gauss-Legendre nodes and weights on [-1,1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int points);

/// Gauss-Legendre quadrature mapped to every element of a basis.
class QuadratureRule1D {
public:
    QuadratureRule1D(const Basis1D& basis, int points_per_element);

    int points_per_element() const noexcept { return points_; }
    int elements() const noexcept { return static_cast<int>(nodes_.size()) / points_; }
    std::span<const double> nodes(int e) const;
    std::span<const double> weights(int e) const;
    /// All nodes, element by element.
    std::span<const double> all_nodes() const noexcept { return nodes_; }
    std::span<const double> all_weights() const noexcept { return weights_; }

private:
    int points_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

enum class FactorKind { mass, advection, l_operator, stiffness, derived };

/// Dense 1D factor matrix with the row-wise nonzero pattern cached.
///
/// Rows and columns may refer to different (trimmed) bases, so the matrix can be
/// rectangular. Entries outside the cached column range of a row are exactly 0.
class FactorMatrix {
public:
    FactorMatrix() = default;
    FactorMatrix(Eigen::MatrixXd values, FactorKind kind = FactorKind::derived);

    static FactorMatrix identity(int n);

    int rows() const noexcept { return static_cast<int>(values_.rows()); }
    int cols() const noexcept { return static_cast<int>(values_.cols()); }
    FactorKind kind() const noexcept { return kind_; }
    const Eigen::MatrixXd& values() const noexcept { return values_; }
    double operator()(int i, int j) const { return values_(i, j); }

    /// Half-bandwidth: max |i - j| over nonzero entries.
    int bandwidth() const noexcept { return bandwidth_; }
    /// Column range [first, last) holding the nonzeros of row i.
    std::pair<int, int> row_range(int i) const { return row_ranges_[i]; }

    FactorMatrix transposed() const;
    bool is_symmetric(double tolerance = 1e-13) const;

private:
    Eigen::MatrixXd values_;
    FactorKind kind_ = FactorKind::derived;
    int bandwidth_ = 0;
    std::vector<std::pair<int, int>> row_ranges_;
};

/// Assembles a 1D factor on a coordinate interval [0, length] (the basis lives on
/// [0,1] and is stretched):
///   mass        M[r][c] = ∫ B_r B_c
///   advection   A[r][c] = ∫ B_r B_c'
///   l_operator  L[r][c] = ∫ B_r (-eps B_c' + beta B_c)
///   stiffness   K[r][c] = ∫ B_r' B_c'
FactorMatrix assemble_factor(const Basis1D& basis, const QuadratureRule1D& quad, FactorKind kind,
                             double eps = 0.0, double beta = 0.0, double length = 1.0);

/// Which boundary functions to delete from one side of a factor.
struct TrimFlags {
    bool first = false;
    bool last = false;

    int removed() const noexcept { return int(first) + int(last); }
    friend bool operator==(const TrimFlags&, const TrimFlags&) = default;
};

/// Submatrix with the flagged first/last rows and columns removed.
FactorMatrix trim(const FactorMatrix& factor, TrimFlags rows, TrimFlags cols);

/// Evaluation matrix E[k][i] = B_i(points[k]) (or B_i' with derivative = true).
FactorMatrix evaluation_matrix(const Basis1D& basis, std::span<const double> points,
                               bool derivative = false);

} // namespace spacetime
