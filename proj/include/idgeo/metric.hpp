#pragma once

// Pullback metric G(z) = J(z)^T J(z) and pointwise measurements under it.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "idgeo/decoder.hpp"
#include "idgeo/errors.hpp"

namespace idgeo {

/// Symmetric d x d metric at one latent point.
template <typename Scalar>
class BasicMetricTensor {
public:
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    explicit BasicMetricTensor(Matrix g) : g_(std::move(g)) {
        if (g_.rows() != g_.cols()) {
            throw ArgumentError("MetricTensor: matrix must be square");
        }
        const Scalar scale = std::max(Scalar(1), g_.cwiseAbs().maxCoeff());
        if ((g_ - g_.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-12) * scale) {
            throw ArgumentError("MetricTensor: matrix is not symmetric");
        }
    }

    const Matrix& matrix() const { return g_; }
    Eigen::Index dim() const { return g_.rows(); }

    template <typename DerivedU, typename DerivedV>
    Scalar inner(const Eigen::MatrixBase<DerivedU>& u, const Eigen::MatrixBase<DerivedV>& v) const {
        if (u.size() != dim() || v.size() != dim()) {
            throw ArgumentError("MetricTensor: tangent vector dimension mismatch");
        }
        return u.dot(g_ * v);
    }

private:
    Matrix g_;
};

using MetricTensor = BasicMetricTensor<double>;

/// |v|_G = sqrt(v^T G v).
template <typename Scalar, typename Derived>
Scalar tangent_norm(const BasicMetricTensor<Scalar>& G, const Eigen::MatrixBase<Derived>& v) {
    return std::sqrt(std::max(Scalar(0), G.inner(v, v)));
}

/// Angle in [0, pi] between nonzero tangent vectors under G.
template <typename Scalar, typename DerivedU, typename DerivedV>
Scalar tangent_angle(const BasicMetricTensor<Scalar>& G, const Eigen::MatrixBase<DerivedU>& u,
                     const Eigen::MatrixBase<DerivedV>& v) {
    const Scalar nu = tangent_norm(G, u);
    const Scalar nv = tangent_norm(G, v);
    if (!(nu > Scalar(0)) || !(nv > Scalar(0))) {
        throw ArgumentError("tangent_angle: vectors must be nonzero");
    }
    const Scalar c = std::clamp(G.inner(u, v) / (nu * nv), Scalar(-1), Scalar(1));
    return std::acos(c);
}

struct PullbackOptions {
    /// Check that the smallest singular value of J exceeds `rank_tol`.
    bool verify = false;
    double rank_tol = 1e-8;
};

MetricTensor pullback_metric(const Decoder& f, const Eigen::VectorXd& z, const PullbackOptions& options = {});

/// Smallest singular value of a Jacobian.
double min_singular_value(const Eigen::MatrixXd& jacobian);

/// Gaussian curvature of (Z, G) for a 2-D latent space, from the Brioschi
/// formula with central finite differences of the metric entries.
double gaussian_curvature_2d(const Decoder& f, const Eigen::VectorXd& z, double fd_step = 1e-3);

} // namespace idgeo
