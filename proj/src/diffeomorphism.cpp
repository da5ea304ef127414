#include "idgeo/diffeomorphism.hpp"

#include <cmath>

#include "idgeo/errors.hpp"

namespace idgeo {

Diffeomorphism::Diffeomorphism(int dim) : dim_(dim) {
    if (dim < 1) {
        throw ArgumentError("Diffeomorphism: dimension must be positive");
    }
}

void Diffeomorphism::check_dim(const Eigen::VectorXd& v, const char* op) const {
    if (v.size() != dim_) {
        throw ArgumentError(std::string(op) + ": expected a " + std::to_string(dim_) +
                            "-vector, got size " + std::to_string(v.size()));
    }
}

Eigen::VectorXd Diffeomorphism::apply(const Eigen::VectorXd& z) const {
    check_dim(z, "diffeo_apply");
    return apply_impl(z);
}

Eigen::VectorXd Diffeomorphism::invert(const Eigen::VectorXd& y) const {
    check_dim(y, "diffeo_invert");
    return invert_impl(y);
}

Eigen::MatrixXd Diffeomorphism::jacobian(const Eigen::VectorXd& z) const {
    check_dim(z, "diffeo_jacobian");
    return jacobian_impl(z);
}

Eigen::MatrixXd Diffeomorphism::inverse_jacobian(const Eigen::VectorXd& y) const {
    check_dim(y, "diffeo_inverse_jacobian");
    return inverse_jacobian_impl(y);
}

// ---------------------------------------------------------------------------

AffineDiffeo::AffineDiffeo(Eigen::MatrixXd matrix, Eigen::VectorXd offset, double max_condition)
    : Diffeomorphism(static_cast<int>(matrix.rows())), matrix_(std::move(matrix)), offset_(std::move(offset)) {
    if (matrix_.rows() != matrix_.cols()) {
        throw ArgumentError("AffineDiffeo: matrix must be square");
    }
    if (offset_.size() != matrix_.rows()) {
        throw ArgumentError("AffineDiffeo: offset size does not match matrix");
    }
    if (!matrix_.allFinite() || !offset_.allFinite()) {
        throw ArgumentError("AffineDiffeo: non-finite entries");
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(matrix_);
    const auto& s = svd.singularValues();
    const double smallest = s(s.size() - 1);
    if (!(smallest > 0.0) || s(0) / smallest > max_condition) {
        throw ArgumentError("AffineDiffeo: matrix is singular or ill-conditioned (condition number " +
                            std::to_string(smallest > 0.0 ? s(0) / smallest : INFINITY) + ")");
    }
    lu_.compute(matrix_);
    inverse_ = lu_.inverse();
}

std::shared_ptr<const AffineDiffeo> AffineDiffeo::identity(int dim) {
    return std::make_shared<const AffineDiffeo>(Eigen::MatrixXd::Identity(dim, dim), Eigen::VectorXd::Zero(dim));
}

Eigen::VectorXd AffineDiffeo::apply_impl(const Eigen::VectorXd& z) const { return matrix_ * z + offset_; }

Eigen::VectorXd AffineDiffeo::invert_impl(const Eigen::VectorXd& y) const {
    return lu_.solve(y - offset_);
}

// ---------------------------------------------------------------------------

CouplingDiffeo::CouplingDiffeo(int dim, int split, std::vector<DenseLayer> shift_net)
    : Diffeomorphism(dim), split_(split), shift_net_(std::move(shift_net)) {
    if (split < 1 || split >= dim) {
        throw ArgumentError("CouplingDiffeo: split must lie in [1, dim - 1]");
    }
    validate_layers(shift_net_, split, dim - split);
}

std::shared_ptr<const CouplingDiffeo> CouplingDiffeo::random(int dim, int split, int hidden, double scale,
                                                             std::mt19937_64& rng) {
    if (hidden < 1) {
        throw ArgumentError("CouplingDiffeo: hidden width must be positive");
    }
    std::normal_distribution<double> normal(0.0, 1.0);
    auto draw = [&](Eigen::Index rows, Eigen::Index cols) {
        Eigen::MatrixXd m(rows, cols);
        for (Eigen::Index j = 0; j < cols; ++j) {
            for (Eigen::Index i = 0; i < rows; ++i) {
                m(i, j) = scale * normal(rng);
            }
        }
        return m;
    };
    std::vector<DenseLayer> net(2);
    net[0].weights = draw(hidden, split);
    net[0].bias = draw(hidden, 1);
    net[0].activation = Activation::Tanh;
    net[1].weights = draw(dim - split, hidden);
    net[1].bias = draw(dim - split, 1);
    net[1].activation = Activation::Linear;
    return std::make_shared<const CouplingDiffeo>(dim, split, std::move(net));
}

Eigen::VectorXd CouplingDiffeo::shift(const Eigen::VectorXd& head) const {
    return mlp_forward(shift_net_, head);
}

Eigen::VectorXd CouplingDiffeo::apply_impl(const Eigen::VectorXd& z) const {
    Eigen::VectorXd y = z;
    y.tail(dim() - split_) += shift(z.head(split_));
    return y;
}

Eigen::VectorXd CouplingDiffeo::invert_impl(const Eigen::VectorXd& y) const {
    Eigen::VectorXd z = y;
    z.tail(dim() - split_) -= shift(y.head(split_));
    return z;
}

Eigen::MatrixXd CouplingDiffeo::shift_jacobian(const Eigen::VectorXd& z) const {
    Eigen::VectorXd out;
    Eigen::MatrixXd jac;
    mlp_forward_jacobian(shift_net_, z.head(split_), out, jac);
    return jac;
}

Eigen::MatrixXd CouplingDiffeo::jacobian_impl(const Eigen::VectorXd& z) const {
    Eigen::MatrixXd J = Eigen::MatrixXd::Identity(dim(), dim());
    J.bottomLeftCorner(dim() - split_, split_) = shift_jacobian(z);
    return J;
}

Eigen::MatrixXd CouplingDiffeo::inverse_jacobian_impl(const Eigen::VectorXd& y) const {
    // The head passes through unchanged, so m is evaluated at y's head.
    Eigen::MatrixXd J = Eigen::MatrixXd::Identity(dim(), dim());
    J.bottomLeftCorner(dim() - split_, split_) = -shift_jacobian(y);
    return J;
}

// ---------------------------------------------------------------------------

namespace {

int composition_dim(const std::vector<DiffeoPtr>& parts) {
    if (parts.empty()) {
        throw ArgumentError("CompositionDiffeo: needs at least one part");
    }
    for (const auto& p : parts) {
        if (!p) throw ArgumentError("CompositionDiffeo: null part");
        if (p->dim() != parts.front()->dim()) {
            throw ArgumentError("CompositionDiffeo: parts have different dimensions");
        }
    }
    return parts.front()->dim();
}

} // namespace

CompositionDiffeo::CompositionDiffeo(std::vector<DiffeoPtr> parts)
    : Diffeomorphism(composition_dim(parts)), parts_(std::move(parts)) {}

Eigen::VectorXd CompositionDiffeo::apply_impl(const Eigen::VectorXd& z) const {
    Eigen::VectorXd y = z;
    for (const auto& p : parts_) y = p->apply(y);
    return y;
}

Eigen::VectorXd CompositionDiffeo::invert_impl(const Eigen::VectorXd& y) const {
    Eigen::VectorXd z = y;
    for (auto it = parts_.rbegin(); it != parts_.rend(); ++it) z = (*it)->invert(z);
    return z;
}

Eigen::MatrixXd CompositionDiffeo::jacobian_impl(const Eigen::VectorXd& z) const {
    Eigen::MatrixXd J = Eigen::MatrixXd::Identity(dim(), dim());
    Eigen::VectorXd x = z;
    for (const auto& p : parts_) {
        J = p->jacobian(x) * J;
        x = p->apply(x);
    }
    return J;
}

Eigen::MatrixXd CompositionDiffeo::inverse_jacobian_impl(const Eigen::VectorXd& y) const {
    Eigen::MatrixXd J = Eigen::MatrixXd::Identity(dim(), dim());
    Eigen::VectorXd x = y;
    for (auto it = parts_.rbegin(); it != parts_.rend(); ++it) {
        J = (*it)->inverse_jacobian(x) * J;
        x = (*it)->invert(x);
    }
    return J;
}

} // namespace idgeo
