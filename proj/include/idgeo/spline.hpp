#pragma once

// Constrained cubic splines used to parametrize latent curves.
//
// A curve between a and b is the straight line between them plus a
// piecewise-cubic deviation S that vanishes at both ends and is C2 at every
// interior knot. Each segment polynomial is written in the global parameter t,
// S_i(t) = a_i + b_i t + c_i t^2 + d_i t^3, so a deviation is described by the
// coefficient vector xi = (a_1, b_1, c_1, d_1, ..., a_n, b_n, c_n, d_n). The
// admissible xi form the null space of the constraint matrix A; with an
// orthonormal basis N of that null space every latent dimension carries its own
// free parameter vector omega and xi = N omega.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "idgeo/errors.hpp"

namespace idgeo {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RowVectorX = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

/// Strictly increasing knots h_0 = 0 < h_1 < ... < h_n = 1.
template <typename Scalar>
class KnotVector {
public:
    explicit KnotVector(std::vector<Scalar> knots) : knots_(std::move(knots)) {
        if (knots_.size() < 2) {
            throw ArgumentError("KnotVector: need at least two knots");
        }
        if (knots_.front() != Scalar(0) || knots_.back() != Scalar(1)) {
            throw ArgumentError("KnotVector: first knot must be 0 and last knot must be 1");
        }
        for (std::size_t i = 1; i < knots_.size(); ++i) {
            if (!(knots_[i] > knots_[i - 1])) {
                throw ArgumentError("KnotVector: knots must be strictly increasing");
            }
        }
    }

    static KnotVector uniform(int n_segments) {
        if (n_segments < 1) {
            throw ArgumentError("KnotVector: n_segments must be positive");
        }
        std::vector<Scalar> h(static_cast<std::size_t>(n_segments) + 1);
        for (int i = 0; i <= n_segments; ++i) {
            h[static_cast<std::size_t>(i)] = Scalar(i) / Scalar(n_segments);
        }
        h.back() = Scalar(1);
        return KnotVector(std::move(h));
    }

    int n_segments() const { return static_cast<int>(knots_.size()) - 1; }
    Scalar operator[](int i) const { return knots_[static_cast<std::size_t>(i)]; }
    const std::vector<Scalar>& values() const { return knots_; }

    /// Zero-based index of the segment containing t. Interior knots belong to
    /// the segment on their right; t = 1 belongs to the last segment.
    int segment_of(Scalar t) const {
        const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
        const int idx = static_cast<int>(it - knots_.begin()) - 1;
        return std::clamp(idx, 0, n_segments() - 1);
    }

private:
    std::vector<Scalar> knots_;
};

/// Row of the derivative of order `order` (0, 1 or 2) of the monomials
/// (1, t, t^2, t^3) evaluated at t.
template <typename Scalar>
Eigen::Matrix<Scalar, 1, 4> monomial_row(Scalar t, int order) {
    Eigen::Matrix<Scalar, 1, 4> row;
    switch (order) {
    case 0: row << Scalar(1), t, t * t, t * t * t; break;
    case 1: row << Scalar(0), Scalar(1), Scalar(2) * t, Scalar(3) * t * t; break;
    case 2: row << Scalar(0), Scalar(0), Scalar(2), Scalar(6) * t; break;
    default: throw ArgumentError("monomial_row: order must be 0, 1 or 2");
    }
    return row;
}

/// Evaluates the order-th derivative of segment `segment` of the spline with
/// coefficients xi at t, regardless of whether t lies inside that segment.
template <typename Scalar, typename Derived>
Scalar segment_polynomial(const Eigen::MatrixBase<Derived>& xi, int segment, Scalar t, int order) {
    return monomial_row<Scalar>(t, order).dot(xi.template segment<4>(4 * segment));
}

/// Assembles A = [B; C0; C1; C2] of shape (3n - 1) x 4n.
///
/// B pins S_1(0) = 0 and S_n(1) = 0. Row i of Ck (knot h_i, i = 1..n-1)
/// carries the 8-vector [m_k(h_i), -m_k(h_i)] at column offset 4(i - 1), where
/// m_k is the k-th derivative of the monomial row.
template <typename Scalar>
MatrixX<Scalar> build_constraint_matrix(int n_segments, const KnotVector<Scalar>& knots) {
    if (n_segments < 1) {
        throw ArgumentError("build_constraint_matrix: n_segments must be positive");
    }
    if (knots.n_segments() != n_segments) {
        throw ArgumentError("build_constraint_matrix: expected " + std::to_string(n_segments + 1) +
                            " knots, got " + std::to_string(knots.n_segments() + 1));
    }
    const int n = n_segments;
    const int interior = n - 1;
    MatrixX<Scalar> A = MatrixX<Scalar>::Zero(2 + 3 * interior, 4 * n);

    A(0, 0) = Scalar(1);
    A.block(1, 4 * (n - 1), 1, 4).setOnes();

    for (int order = 0; order < 3; ++order) {
        const int row0 = 2 + order * interior;
        for (int i = 1; i <= interior; ++i) {
            const auto m = monomial_row<Scalar>(knots[i], order);
            A.block(row0 + i - 1, 4 * (i - 1), 1, 4) = m;
            A.block(row0 + i - 1, 4 * i, 1, 4) = -m;
        }
    }
    return A;
}

namespace detail {

// Remembers the nullity found for each constraint-matrix shape so that a
// numerically unstable rank decision is reported instead of silently changing
// the number of free parameters.
template <typename Scalar>
void record_nullity(Eigen::Index rows, Eigen::Index cols, Eigen::Index nullity) {
    static std::mutex mutex;
    static std::map<std::pair<Eigen::Index, Eigen::Index>, Eigen::Index> seen;
    std::lock_guard lock(mutex);
    const auto key = std::make_pair(rows, cols);
    const auto [it, inserted] = seen.emplace(key, nullity);
    if (!inserted && it->second != nullity) {
        throw DiagnosticError("null_space_basis: nullity " + std::to_string(nullity) + " for a " +
                              std::to_string(rows) + "x" + std::to_string(cols) +
                              " constraint matrix differs from earlier value " +
                              std::to_string(it->second));
    }
}

} // namespace detail

/// Orthonormal basis of the null space of a constraint matrix.
template <typename Scalar>
class NullSpaceBasis {
public:
    NullSpaceBasis(MatrixX<Scalar> basis, Eigen::Index rank)
        : basis_(std::move(basis)), rank_(rank) {}

    const MatrixX<Scalar>& matrix() const { return basis_; }
    Eigen::Index nullity() const { return basis_.cols(); }
    Eigen::Index rank() const { return rank_; }

private:
    MatrixX<Scalar> basis_;
    Eigen::Index rank_;
};

/// Right singular vectors of A whose singular value is below sv_tol * sigma_max.
template <typename Scalar>
NullSpaceBasis<Scalar> null_space_basis(const MatrixX<Scalar>& A, Scalar sv_tol) {
    if (A.size() == 0) {
        throw ArgumentError("null_space_basis: empty matrix");
    }
    if (!(sv_tol > Scalar(0))) {
        throw ArgumentError("null_space_basis: sv_tol must be positive");
    }
    Eigen::JacobiSVD<MatrixX<Scalar>> svd(A, Eigen::ComputeFullV);
    const auto& sigma = svd.singularValues();
    const Scalar cutoff = sv_tol * sigma(0);
    Eigen::Index rank = 0;
    while (rank < sigma.size() && sigma(rank) >= cutoff) {
        ++rank;
    }
    const Eigen::Index nullity = A.cols() - rank;
    detail::record_nullity<Scalar>(A.rows(), A.cols(), nullity);
    return NullSpaceBasis<Scalar>(svd.matrixV().rightCols(nullity), rank);
}

/// Knots, constraint system and its null-space basis for one spline layout.
/// Shared by every latent dimension of a curve.
template <typename Scalar>
class SplineBasis {
public:
    static constexpr double kDefaultSvTol = 1e-10;

    SplineBasis(KnotVector<Scalar> knots, Scalar sv_tol = Scalar(kDefaultSvTol))
        : knots_(std::move(knots)),
          constraints_(build_constraint_matrix(knots_.n_segments(), knots_)),
          null_space_(null_space_basis(constraints_, sv_tol)) {}

    static std::shared_ptr<const SplineBasis> uniform(int n_segments,
                                                      Scalar sv_tol = Scalar(kDefaultSvTol)) {
        return std::make_shared<const SplineBasis>(KnotVector<Scalar>::uniform(n_segments), sv_tol);
    }

    const KnotVector<Scalar>& knots() const { return knots_; }
    int n_segments() const { return knots_.n_segments(); }
    const MatrixX<Scalar>& constraints() const { return constraints_; }
    const MatrixX<Scalar>& null_space() const { return null_space_.matrix(); }
    Eigen::Index n_free() const { return null_space_.nullity(); }

    /// Row r(t) with S^(order)(t) = r(t) . omega for one latent dimension.
    /// At t = 0 and t = 1 the value row coincides with a boundary row of A and
    /// is returned as exact zeros.
    RowVectorX<Scalar> evaluation_row(Scalar t, int order = 0) const {
        if (order == 0 && (t == Scalar(0) || t == Scalar(1))) {
            return RowVectorX<Scalar>::Zero(n_free());
        }
        const int seg = knots_.segment_of(t);
        return monomial_row<Scalar>(t, order) * null_space().middleRows(4 * seg, 4);
    }

private:
    KnotVector<Scalar> knots_;
    MatrixX<Scalar> constraints_;
    NullSpaceBasis<Scalar> null_space_;
};

template <typename Scalar>
using SplineBasisPtr = std::shared_ptr<const SplineBasis<Scalar>>;

/// gamma(t) = (1 - t) a + t b + S(t), one spline per latent dimension.
template <typename Scalar>
struct GeodesicCurve {
    VectorX<Scalar> a;
    VectorX<Scalar> b;
    SplineBasisPtr<Scalar> basis;
    MatrixX<Scalar> omega; // d x k, one row per latent dimension

    GeodesicCurve(VectorX<Scalar> a_, VectorX<Scalar> b_, SplineBasisPtr<Scalar> basis_)
        : a(std::move(a_)), b(std::move(b_)), basis(std::move(basis_)) {
        if (a.size() != b.size()) {
            throw ArgumentError("GeodesicCurve: endpoint dimensions differ");
        }
        if (!basis) {
            throw ArgumentError("GeodesicCurve: null spline basis");
        }
        omega = MatrixX<Scalar>::Zero(a.size(), basis->n_free());
    }

    GeodesicCurve(VectorX<Scalar> a_, VectorX<Scalar> b_, SplineBasisPtr<Scalar> basis_,
                  MatrixX<Scalar> omega_)
        : GeodesicCurve(std::move(a_), std::move(b_), std::move(basis_)) {
        if (omega_.rows() != omega.rows() || omega_.cols() != omega.cols()) {
            throw ArgumentError("GeodesicCurve: omega must be " + std::to_string(omega.rows()) + "x" +
                                std::to_string(omega.cols()));
        }
        omega = std::move(omega_);
    }

    Eigen::Index dim() const { return a.size(); }

    /// Polynomial coefficients xi = N omega_d for latent dimension d.
    VectorX<Scalar> coefficients(Eigen::Index d) const {
        return basis->null_space() * omega.row(d).transpose();
    }
};

/// (1 - t) a + t b, exact at t = 0, t = 1 and for a = b.
template <typename Scalar>
VectorX<Scalar> chord_point(const VectorX<Scalar>& a, const VectorX<Scalar>& b, Scalar t) {
    return a.binaryExpr(b, [t](Scalar x, Scalar y) { return std::lerp(x, y, t); });
}

namespace detail {

template <typename Scalar>
void check_curve_parameter(Scalar t, const char* op) {
    if (!(t >= Scalar(0) && t <= Scalar(1))) {
        throw ArgumentError(std::string(op) + ": t must lie in [0, 1]");
    }
}

} // namespace detail

template <typename Scalar>
VectorX<Scalar> curve_eval(const GeodesicCurve<Scalar>& curve, Scalar t) {
    detail::check_curve_parameter(t, "curve_eval");
    const RowVectorX<Scalar> row = curve.basis->evaluation_row(t, 0);
    return chord_point(curve.a, curve.b, t) + curve.omega * row.transpose();
}

template <typename Scalar>
VectorX<Scalar> curve_velocity(const GeodesicCurve<Scalar>& curve, Scalar t) {
    detail::check_curve_parameter(t, "curve_velocity");
    const RowVectorX<Scalar> row = curve.basis->evaluation_row(t, 1);
    return (curve.b - curve.a) + curve.omega * row.transpose();
}

/// d x k matrix whose row d is d gamma_d(t) / d omega_d. The curve is linear in
/// omega, so the result does not depend on the current parameters.
template <typename Scalar>
MatrixX<Scalar> curve_param_jacobian(const GeodesicCurve<Scalar>& curve, Scalar t) {
    detail::check_curve_parameter(t, "curve_param_jacobian");
    const RowVectorX<Scalar> row = curve.basis->evaluation_row(t, 0);
    return row.replicate(curve.dim(), 1);
}

} // namespace idgeo
