// SPDX-License-Identifier: MIT
#include "spacetime/bspline.hpp"

#include "spacetime/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace spacetime {

Basis1D::Basis1D(int elements, int degree)
: elements_{elements}
, degree_{degree} {
    if (elements < 1) {
        throw InputError{fmt::format("B-spline basis needs at least one element, got {}", elements)};
    }
    if (degree < 1) {
        throw InputError{fmt::format("B-spline degree must be at least 1, got {}", degree)};
    }
    knots_.reserve(elements + 2 * degree + 1);
    knots_.insert(knots_.end(), degree, 0.0);
    for (int i = 0; i <= elements; ++i) {
        knots_.push_back(static_cast<double>(i) / elements);
    }
    knots_.insert(knots_.end(), degree, 1.0);
}

int Basis1D::find_element(double x) const {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw InputError{fmt::format("evaluation point {} outside [0,1]", x)};
    }
    int e = std::min(static_cast<int>(x * elements_), elements_ - 1);
    // guard against rounding in x * n near interior knots
    while (e > 0 && x < element_begin(e)) {
        --e;
    }
    while (e < elements_ - 1 && x >= element_end(e)) {
        ++e;
    }
    return e;
}

std::vector<double> Basis1D::greville() const {
    std::vector<double> points(dofs());
    for (int i = 0; i < dofs(); ++i) {
        double sum = 0.0;
        for (int k = 1; k <= degree_; ++k) {
            sum += knots_[i + k];
        }
        points[i] = sum / degree_;
    }
    return points;
}

Basis1D make_basis(int elements, int degree) {
    return Basis1D{elements, degree};
}

BasisValues eval_basis(const Basis1D& basis, double x) {
    const int p = basis.degree();
    const int e = basis.find_element(x);
    const int span = e + p;
    const auto u = basis.knots();

    std::vector<double> left(p + 1), right(p + 1);
    std::vector<double> n(p + 1, 0.0);
    std::vector<double> lower;
    n[0] = 1.0;
    for (int j = 1; j <= p; ++j) {
        if (j == p) {
            lower.assign(n.begin(), n.begin() + p);
        }
        left[j] = x - u[span + 1 - j];
        right[j] = u[span + j] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double tmp = n[r] / (right[r + 1] + left[j - r]);
            n[r] = saved + right[r + 1] * tmp;
            saved = left[j - r] * tmp;
        }
        n[j] = saved;
    }

    BasisValues out;
    out.first_dof = span - p;
    out.values = std::move(n);
    out.derivatives.assign(p + 1, 0.0);
    // N'_{i,p} = p N_{i,p-1} / (u_{i+p} - u_i) - p N_{i+1,p-1} / (u_{i+p+1} - u_{i+1})
    for (int k = 0; k <= p; ++k) {
        const int i = span - p + k;
        double d = 0.0;
        if (k >= 1) {
            d += p * lower[k - 1] / (u[i + p] - u[i]);
        }
        if (k < p) {
            d -= p * lower[k] / (u[i + p + 1] - u[i + 1]);
        }
        out.derivatives[k] = d;
    }
    return out;
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int points) {
    if (points < 1) {
        throw InputError{"Gauss-Legendre rule needs at least one point"};
    }
    std::vector<double> nodes(points), weights(points);
    for (int i = 0; i < (points + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (points + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= points; ++k) {
                const double pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = points * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        nodes[i] = -x;
        nodes[points - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[points - 1 - i] = w;
    }
    if (points % 2 == 1) {
        nodes[points / 2] = 0.0;
    }
    return {nodes, weights};
}

QuadratureRule1D::QuadratureRule1D(const Basis1D& basis, int points_per_element)
: points_{points_per_element} {
    const auto [ref_nodes, ref_weights] = gauss_legendre(points_per_element);
    nodes_.reserve(basis.elements() * points_);
    weights_.reserve(basis.elements() * points_);
    for (int e = 0; e < basis.elements(); ++e) {
        const double a = basis.element_begin(e);
        const double b = basis.element_end(e);
        for (int q = 0; q < points_; ++q) {
            nodes_.push_back(0.5 * (a + b) + 0.5 * (b - a) * ref_nodes[q]);
            weights_.push_back(0.5 * (b - a) * ref_weights[q]);
        }
    }
}

std::span<const double> QuadratureRule1D::nodes(int e) const {
    return std::span<const double>{nodes_}.subspan(e * points_, points_);
}

std::span<const double> QuadratureRule1D::weights(int e) const {
    return std::span<const double>{weights_}.subspan(e * points_, points_);
}

FactorMatrix::FactorMatrix(Eigen::MatrixXd values, FactorKind kind)
: values_{std::move(values)}
, kind_{kind} {
    row_ranges_.resize(values_.rows());
    for (Eigen::Index i = 0; i < values_.rows(); ++i) {
        int first = static_cast<int>(values_.cols());
        int last = 0;
        for (Eigen::Index j = 0; j < values_.cols(); ++j) {
            if (values_(i, j) != 0.0) {
                first = std::min(first, static_cast<int>(j));
                last = static_cast<int>(j) + 1;
                bandwidth_ = std::max(bandwidth_, static_cast<int>(std::abs(i - j)));
            }
        }
        row_ranges_[i] = first < last ? std::pair{first, last} : std::pair{0, 0};
    }
}

FactorMatrix FactorMatrix::identity(int n) {
    return FactorMatrix{Eigen::MatrixXd::Identity(n, n), FactorKind::derived};
}

FactorMatrix FactorMatrix::transposed() const {
    return FactorMatrix{values_.transpose(), kind_};
}

bool FactorMatrix::is_symmetric(double tolerance) const {
    if (rows() != cols()) {
        return false;
    }
    const double scale = std::max(values_.cwiseAbs().maxCoeff(), 1e-300);
    return (values_ - values_.transpose()).cwiseAbs().maxCoeff() <= tolerance * scale;
}

FactorMatrix assemble_factor(const Basis1D& basis, const QuadratureRule1D& quad, FactorKind kind,
                             double eps, double beta, double length) {
    if (kind == FactorKind::derived) {
        throw InputError{"assemble_factor: 'derived' is not an assemblable factor kind"};
    }
    if (!(length > 0.0)) {
        throw InputError{fmt::format("assemble_factor: interval length must be positive, got {}", length)};
    }
    const int n = basis.dofs();
    const int p = basis.degree();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int e = 0; e < basis.elements(); ++e) {
        const auto nodes = quad.nodes(e);
        const auto weights = quad.weights(e);
        for (int q = 0; q < quad.points_per_element(); ++q) {
            const auto b = eval_basis(basis, nodes[q]);
            const double w = weights[q];
            for (int a = 0; a <= p; ++a) {
                const int r = b.first_dof + a;
                for (int c = 0; c <= p; ++c) {
                    const int col = b.first_dof + c;
                    double v = 0.0;
                    switch (kind) {
                    case FactorKind::mass:
                        v = length * b.values[a] * b.values[c];
                        break;
                    case FactorKind::advection:
                        v = b.values[a] * b.derivatives[c];
                        break;
                    case FactorKind::l_operator:
                        v = b.values[a] * (-eps * b.derivatives[c] + beta * length * b.values[c]);
                        break;
                    case FactorKind::stiffness:
                        v = b.derivatives[a] * b.derivatives[c] / length;
                        break;
                    case FactorKind::derived:
                        break;
                    }
                    m(r, col) += w * v;
                }
            }
        }
    }
    return FactorMatrix{std::move(m), kind};
}

namespace {

std::vector<int> kept_indices(int n, TrimFlags flags) {
    std::vector<int> idx;
    for (int i = flags.first ? 1 : 0; i < (flags.last ? n - 1 : n); ++i) {
        idx.push_back(i);
    }
    return idx;
}

} // namespace

FactorMatrix trim(const FactorMatrix& factor, TrimFlags rows, TrimFlags cols) {
    if (factor.rows() - rows.removed() < 1 || factor.cols() - cols.removed() < 1) {
        throw InputError{fmt::format("trim would remove every dof of a {}x{} factor", factor.rows(),
                                     factor.cols())};
    }
    const auto ri = kept_indices(factor.rows(), rows);
    const auto ci = kept_indices(factor.cols(), cols);
    Eigen::MatrixXd m(ri.size(), ci.size());
    for (std::size_t i = 0; i < ri.size(); ++i) {
        for (std::size_t j = 0; j < ci.size(); ++j) {
            m(i, j) = factor(ri[i], ci[j]);
        }
    }
    return FactorMatrix{std::move(m), factor.kind()};
}

FactorMatrix evaluation_matrix(const Basis1D& basis, std::span<const double> points, bool derivative) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(points.size()), basis.dofs());
    for (std::size_t k = 0; k < points.size(); ++k) {
        const auto b = eval_basis(basis, points[k]);
        const auto& src = derivative ? b.derivatives : b.values;
        for (int a = 0; a <= basis.degree(); ++a) {
            m(static_cast<Eigen::Index>(k), b.first_dof + a) = src[a];
        }
    }
    return FactorMatrix{std::move(m), FactorKind::derived};
}

} // namespace spacetime
