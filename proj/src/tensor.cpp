// SPDX-License-Identifier: MIT
#include "spacetime/tensor.hpp"

#include "spacetime/error.hpp"

#include <fmt/format.h>

#include <cmath>

namespace spacetime {

std::string to_string(const Shape3& s) {
    return fmt::format("({}, {}, {})", s.nx, s.ny, s.nt);
}

namespace {

const char* direction_name(Direction d) {
    switch (d) {
    case Direction::x:
        return "x";
    case Direction::y:
        return "y";
    case Direction::t:
        return "t";
    }
    return "?";
}

void require_same_shape(const Field& a, const Field& b, const char* what) {
    if (a.shape() != b.shape()) {
        throw InputError{fmt::format("{}: shape mismatch {} vs {}", what, to_string(a.shape()),
                                     to_string(b.shape()))};
    }
}

} // namespace

Field::Field(Shape3 shape, double value)
: shape_{shape}
, data_(shape.size(), value) { }

Field::Field(Shape3 shape, std::vector<double> data)
: shape_{shape}
, data_{std::move(data)} {
    if (data_.size() != shape_.size()) {
        throw InputError{fmt::format("field data length {} does not match shape {}", data_.size(),
                                     to_string(shape_))};
    }
}

Field& Field::operator+=(const Field& other) {
    require_same_shape(*this, other, "field +=");
    vec() += other.vec();
    return *this;
}

Field& Field::operator-=(const Field& other) {
    require_same_shape(*this, other, "field -=");
    vec() -= other.vec();
    return *this;
}

Field& Field::operator*=(double a) {
    vec() *= a;
    return *this;
}

Field& Field::axpy(double a, const Field& other) {
    require_same_shape(*this, other, "field axpy");
    vec() += a * other.vec();
    return *this;
}

double Field::norm() const {
    return vec().norm();
}

Field operator+(Field a, const Field& b) {
    return a += b;
}

Field operator-(Field a, const Field& b) {
    return a -= b;
}

Field operator*(double a, Field f) {
    return f *= a;
}

double dot(const Field& a, const Field& b) {
    require_same_shape(a, b, "field dot");
    return a.vec().dot(b.vec());
}

Field restrict_field(const Field& full, const TrimFlags3& flags) {
    const Shape3 s = flags.apply(full.shape());
    Field out{s};
    const int ox = flags.x.first ? 1 : 0;
    const int oy = flags.y.first ? 1 : 0;
    const int ot = flags.t.first ? 1 : 0;
    for (int it = 0; it < s.nt; ++it) {
        for (int iy = 0; iy < s.ny; ++iy) {
            for (int ix = 0; ix < s.nx; ++ix) {
                out(ix, iy, it) = full(ix + ox, iy + oy, it + ot);
            }
        }
    }
    return out;
}

Field extend_field(const Field& trimmed, const TrimFlags3& flags, const Shape3& full) {
    if (flags.apply(full) != trimmed.shape()) {
        throw InputError{fmt::format("extend_field: trimmed shape {} does not fit full shape {}",
                                     to_string(trimmed.shape()), to_string(full))};
    }
    Field out{full};
    const Shape3 s = trimmed.shape();
    const int ox = flags.x.first ? 1 : 0;
    const int oy = flags.y.first ? 1 : 0;
    const int ot = flags.t.first ? 1 : 0;
    for (int it = 0; it < s.nt; ++it) {
        for (int iy = 0; iy < s.ny; ++iy) {
            for (int ix = 0; ix < s.nx; ++ix) {
                out(ix + ox, iy + oy, it + ot) = trimmed(ix, iy, it);
            }
        }
    }
    return out;
}

Field apply_along(const Eigen::MatrixXd& m, Direction d, const Field& v) {
    using Map = Eigen::Map<Eigen::MatrixXd>;
    using CMap = Eigen::Map<const Eigen::MatrixXd>;
    const Shape3 in = v.shape();
    const auto rows = static_cast<int>(m.rows());
    const auto cols = static_cast<int>(m.cols());
    const int extent = d == Direction::x ? in.nx : d == Direction::y ? in.ny : in.nt;
    if (cols != extent) {
        throw InputError{fmt::format("factor with {} columns applied along {} of a field with shape {}",
                                     cols, direction_name(d), to_string(in))};
    }
    switch (d) {
    case Direction::x: {
        Field out{{rows, in.ny, in.nt}};
        CMap src{v.data().data(), in.nx, Eigen::Index(in.ny) * in.nt};
        Map dst{out.data().data(), rows, Eigen::Index(in.ny) * in.nt};
        dst.noalias() = m * src;
        return out;
    }
    case Direction::y: {
        Field out{{in.nx, rows, in.nt}};
        for (int it = 0; it < in.nt; ++it) {
            CMap src{v.data().data() + std::size_t(in.nx) * in.ny * it, in.nx, in.ny};
            Map dst{out.data().data() + std::size_t(in.nx) * rows * it, in.nx, rows};
            dst.noalias() = src * m.transpose();
        }
        return out;
    }
    case Direction::t: {
        Field out{{in.nx, in.ny, rows}};
        CMap src{v.data().data(), Eigen::Index(in.nx) * in.ny, in.nt};
        Map dst{out.data().data(), Eigen::Index(in.nx) * in.ny, rows};
        dst.noalias() = src * m.transpose();
        return out;
    }
    }
    return {};
}

KronOperator3::KronOperator3(FactorMatrix fx, FactorMatrix fy, FactorMatrix ft, double weight)
: factors_{std::move(fx), std::move(fy), std::move(ft)}
, weight_{weight} { }

Shape3 KronOperator3::in_shape() const {
    return {factors_[0].cols(), factors_[1].cols(), factors_[2].cols()};
}

Shape3 KronOperator3::out_shape() const {
    return {factors_[0].rows(), factors_[1].rows(), factors_[2].rows()};
}

Field KronOperator3::apply(const Field& v) const {
    if (v.shape() != in_shape()) {
        throw InputError{fmt::format("Kronecker operator expects input shape {}, got {}",
                                     to_string(in_shape()), to_string(v.shape()))};
    }
    Field out = apply_along(factors_[0].values(), Direction::x, v);
    out = apply_along(factors_[1].values(), Direction::y, out);
    out = apply_along(factors_[2].values(), Direction::t, out);
    if (weight_ != 1.0) {
        out *= weight_;
    }
    return out;
}

Field KronOperator3::apply_transpose(const Field& v) const {
    return transposed().apply(v);
}

KronOperator3 KronOperator3::transposed() const {
    return {factors_[0].transposed(), factors_[1].transposed(), factors_[2].transposed(), weight_};
}

SumKron3::SumKron3(std::vector<KronOperator3> terms)
: terms_{std::move(terms)} {
    if (terms_.empty()) {
        throw InputError{"SumKron3 needs at least one term"};
    }
    for (const auto& t : terms_) {
        if (t.in_shape() != terms_.front().in_shape() || t.out_shape() != terms_.front().out_shape()) {
            throw InputError{"SumKron3 terms must share input and output shapes"};
        }
    }
}

Shape3 SumKron3::in_shape() const {
    return terms_.front().in_shape();
}

Shape3 SumKron3::out_shape() const {
    return terms_.front().out_shape();
}

Field SumKron3::apply(const Field& v) const {
    Field out{out_shape()};
    for (const auto& t : terms_) {
        out += t.apply(v);
    }
    return out;
}

Field SumKron3::apply_transpose(const Field& v) const {
    Field out{in_shape()};
    for (const auto& t : terms_) {
        out += t.apply_transpose(v);
    }
    return out;
}

Field kron_apply(const KronOperator3& op, const Field& v) {
    return op.apply(v);
}

Field kron_apply(const SumKron3& op, const Field& v) {
    return op.apply(v);
}

std::optional<BandedCholesky> BandedCholesky::factorize(const Eigen::MatrixXd& m, int bandwidth) {
    BandedCholesky c;
    c.n_ = static_cast<int>(m.rows());
    c.bw_ = bandwidth;
    const int w = bandwidth + 1;
    c.l_.assign(std::size_t(c.n_) * w, 0.0);
    auto at = [&](int i, int j) -> double& { return c.l_[std::size_t(i) * w + (i - j)]; };
    for (int i = 0; i < c.n_; ++i) {
        for (int j = std::max(0, i - bandwidth); j <= i; ++j) {
            double s = m(i, j);
            for (int k = std::max(0, i - bandwidth); k < j; ++k) {
                if (j - k <= bandwidth) {
                    s -= at(i, k) * at(j, k);
                }
            }
            if (i == j) {
                if (!(s > 1e-14 * std::abs(m(i, i))) || s <= 0.0) {
                    return std::nullopt;
                }
                at(i, i) = std::sqrt(s);
            } else {
                at(i, j) = s / at(j, j);
            }
        }
    }
    return c;
}

void BandedCholesky::solve_in_place(double* x, std::ptrdiff_t stride) const {
    const int w = bw_ + 1;
    auto l = [&](int i, int j) { return l_[std::size_t(i) * w + (i - j)]; };
    for (int i = 0; i < n_; ++i) {
        double s = x[i * stride];
        for (int k = std::max(0, i - bw_); k < i; ++k) {
            s -= l(i, k) * x[k * stride];
        }
        x[i * stride] = s / l(i, i);
    }
    for (int i = n_ - 1; i >= 0; --i) {
        double s = x[i * stride];
        for (int k = i + 1; k <= std::min(n_ - 1, i + bw_); ++k) {
            s -= l(k, i) * x[k * stride];
        }
        x[i * stride] = s / l(i, i);
    }
}

KronSolver::KronSolver(const KronOperator3& op)
: shape_{op.in_shape()}
, weight_{op.weight()}
, factors_{BandedCholesky{}, BandedCholesky{}, BandedCholesky{}} {
    if (op.in_shape() != op.out_shape()) {
        throw InputError{"kron_solve needs square factors"};
    }
    if (weight_ == 0.0) {
        throw SolverError{"kron_solve: operator weight is zero"};
    }
    for (int d = 0; d < 3; ++d) {
        const auto& f = op.factor(static_cast<Direction>(d));
        std::optional<BandedCholesky> chol;
        if (f.is_symmetric()) {
            chol = BandedCholesky::factorize(f.values(), f.bandwidth());
        }
        if (chol) {
            factors_[d] = std::move(*chol);
            continue;
        }
        Eigen::PartialPivLU<Eigen::MatrixXd> lu{f.values()};
        if (!(lu.rcond() > 1e-14)) {
            throw SolverError{fmt::format("kron_solve: factor in direction {} is singular (rcond {:.3e})",
                                          direction_name(static_cast<Direction>(d)), lu.rcond())};
        }
        factors_[d] = std::move(lu);
    }
}

Field KronSolver::solve(const Field& rhs) const {
    if (rhs.shape() != shape_) {
        throw InputError{fmt::format("kron_solve: rhs shape {} does not match operator shape {}",
                                     to_string(rhs.shape()), to_string(shape_))};
    }
    Field x = rhs;
    const std::array<int, 3> extent{shape_.nx, shape_.ny, shape_.nt};
    const std::array<std::ptrdiff_t, 3> stride{1, shape_.nx, std::ptrdiff_t(shape_.nx) * shape_.ny};
    double* data = x.data().data();
    for (int d = 0; d < 3; ++d) {
        // enumerate the start of every line along direction d
        std::vector<std::size_t> starts;
        starts.reserve(x.size() / extent[d]);
        for (int it = 0; it < (d == 2 ? 1 : shape_.nt); ++it) {
            for (int iy = 0; iy < (d == 1 ? 1 : shape_.ny); ++iy) {
                for (int ix = 0; ix < (d == 0 ? 1 : shape_.nx); ++ix) {
                    starts.push_back(x.index(ix, iy, it));
                }
            }
        }
        std::visit(
            [&](const auto& f) {
                using F = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<F, BandedCholesky>) {
                    for (auto s : starts) {
                        f.solve_in_place(data + s, stride[d]);
                    }
                } else {
                    Eigen::VectorXd line(extent[d]);
                    for (auto s : starts) {
                        for (int k = 0; k < extent[d]; ++k) {
                            line[k] = data[s + k * stride[d]];
                        }
                        line = f.solve(line);
                        for (int k = 0; k < extent[d]; ++k) {
                            data[s + k * stride[d]] = line[k];
                        }
                    }
                }
            },
            factors_[d]);
    }
    if (weight_ != 1.0) {
        x *= 1.0 / weight_;
    }
    return x;
}

Field kron_solve(const KronOperator3& op, const Field& rhs) {
    return KronSolver{op}.solve(rhs);
}

} // namespace spacetime
