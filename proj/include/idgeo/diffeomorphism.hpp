#pragma once

// Invertible latent maps A used to build alternative parametrizations
// f_b = f_a o A^{-1} of the same decoded manifold.

#include <Eigen/Dense>

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "idgeo/dense_layer.hpp"

namespace idgeo {

class Diffeomorphism {
public:
    virtual ~Diffeomorphism() = default;

    int dim() const { return dim_; }

    Eigen::VectorXd apply(const Eigen::VectorXd& z) const;
    Eigen::VectorXd invert(const Eigen::VectorXd& y) const;
    /// Jacobian of the forward map at z.
    Eigen::MatrixXd jacobian(const Eigen::VectorXd& z) const;
    /// Jacobian of the inverse map at y.
    Eigen::MatrixXd inverse_jacobian(const Eigen::VectorXd& y) const;

    virtual std::string kind() const = 0;

protected:
    explicit Diffeomorphism(int dim);

    virtual Eigen::VectorXd apply_impl(const Eigen::VectorXd& z) const = 0;
    virtual Eigen::VectorXd invert_impl(const Eigen::VectorXd& y) const = 0;
    virtual Eigen::MatrixXd jacobian_impl(const Eigen::VectorXd& z) const = 0;
    virtual Eigen::MatrixXd inverse_jacobian_impl(const Eigen::VectorXd& y) const = 0;

private:
    void check_dim(const Eigen::VectorXd& v, const char* op) const;

    int dim_;
};

using DiffeoPtr = std::shared_ptr<const Diffeomorphism>;

/// z -> M z + c. Construction rejects matrices whose condition number exceeds
/// `max_condition`.
class AffineDiffeo final : public Diffeomorphism {
public:
    static constexpr double kMaxCondition = 1e8;

    AffineDiffeo(Eigen::MatrixXd matrix, Eigen::VectorXd offset, double max_condition = kMaxCondition);

    static std::shared_ptr<const AffineDiffeo> identity(int dim);

    const Eigen::MatrixXd& matrix() const { return matrix_; }
    const Eigen::VectorXd& offset() const { return offset_; }
    std::string kind() const override { return "affine"; }

protected:
    Eigen::VectorXd apply_impl(const Eigen::VectorXd& z) const override;
    Eigen::VectorXd invert_impl(const Eigen::VectorXd& y) const override;
    Eigen::MatrixXd jacobian_impl(const Eigen::VectorXd&) const override { return matrix_; }
    Eigen::MatrixXd inverse_jacobian_impl(const Eigen::VectorXd&) const override { return inverse_; }

private:
    Eigen::MatrixXd matrix_;
    Eigen::VectorXd offset_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
    Eigen::MatrixXd inverse_;
};

/// Additive coupling: (z1, z2) -> (z1, z2 + m(z1)) with z1 the first `split`
/// coordinates and m a small dense network. The inverse subtracts m(z1).
class CouplingDiffeo final : public Diffeomorphism {
public:
    CouplingDiffeo(int dim, int split, std::vector<DenseLayer> shift_net);

    /// Two-layer shift network tanh(W1 z1 + b1) -> W2 h + b2 with standard
    /// normal weights and biases multiplied by `scale`.
    static std::shared_ptr<const CouplingDiffeo> random(int dim, int split, int hidden, double scale,
                                                        std::mt19937_64& rng);

    int split() const { return split_; }
    const std::vector<DenseLayer>& shift_net() const { return shift_net_; }
    Eigen::VectorXd shift(const Eigen::VectorXd& head) const;
    std::string kind() const override { return "coupling"; }

protected:
    Eigen::VectorXd apply_impl(const Eigen::VectorXd& z) const override;
    Eigen::VectorXd invert_impl(const Eigen::VectorXd& y) const override;
    Eigen::MatrixXd jacobian_impl(const Eigen::VectorXd& z) const override;
    Eigen::MatrixXd inverse_jacobian_impl(const Eigen::VectorXd& y) const override;

private:
    Eigen::MatrixXd shift_jacobian(const Eigen::VectorXd& z) const;

    int split_;
    std::vector<DenseLayer> shift_net_;
};

/// parts[0] is applied first: A = parts[n-1] o ... o parts[0].
class CompositionDiffeo final : public Diffeomorphism {
public:
    explicit CompositionDiffeo(std::vector<DiffeoPtr> parts);

    const std::vector<DiffeoPtr>& parts() const { return parts_; }
    std::string kind() const override { return "composition"; }

protected:
    Eigen::VectorXd apply_impl(const Eigen::VectorXd& z) const override;
    Eigen::VectorXd invert_impl(const Eigen::VectorXd& y) const override;
    Eigen::MatrixXd jacobian_impl(const Eigen::VectorXd& z) const override;
    Eigen::MatrixXd inverse_jacobian_impl(const Eigen::VectorXd& y) const override;

private:
    std::vector<DiffeoPtr> parts_;
};

inline Eigen::VectorXd diffeo_apply(const Diffeomorphism& A, const Eigen::VectorXd& z) { return A.apply(z); }
inline Eigen::VectorXd diffeo_invert(const Diffeomorphism& A, const Eigen::VectorXd& y) { return A.invert(y); }

} // namespace idgeo
