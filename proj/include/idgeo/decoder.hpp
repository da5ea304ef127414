#pragma once

// Smooth decoders f : Z -> R^D with analytic Jacobians.

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <vector>

#include "idgeo/dense_layer.hpp"
#include "idgeo/diffeomorphism.hpp"

namespace idgeo {

/// Axis-aligned compact latent domain.
struct Box {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    static Box symmetric(int dim, double half_width);

    Eigen::Index dim() const { return lower.size(); }
    bool contains(const Eigen::VectorXd& z, double slack = 0.0) const;
    double diagonal() const { return (upper - lower).norm(); }
};

class Decoder {
public:
    virtual ~Decoder() = default;

    int latent_dim() const { return latent_dim_; }
    int ambient_dim() const { return ambient_dim_; }
    const Box& domain() const { return domain_; }

    /// Throws ArgumentError on a dimension mismatch and NumericError on a
    /// non-finite result.
    Eigen::VectorXd decode(const Eigen::VectorXd& z) const;
    Eigen::MatrixXd jacobian(const Eigen::VectorXd& z) const;
    /// Value and Jacobian in one pass.
    void evaluate(const Eigen::VectorXd& z, Eigen::VectorXd& x, Eigen::MatrixXd& jac) const;

    virtual std::string kind() const = 0;
    /// False for decoders whose injectivity is assumed rather than guaranteed.
    virtual bool injectivity_certified() const { return true; }

protected:
    Decoder(int latent_dim, int ambient_dim, Box domain);

    virtual Eigen::VectorXd decode_impl(const Eigen::VectorXd& z) const = 0;
    virtual Eigen::MatrixXd jacobian_impl(const Eigen::VectorXd& z) const = 0;
    virtual void evaluate_impl(const Eigen::VectorXd& z, Eigen::VectorXd& x, Eigen::MatrixXd& jac) const;

private:
    void check_input(const Eigen::VectorXd& z, const char* op) const;

    int latent_dim_;
    int ambient_dim_;
    Box domain_;
};

using DecoderPtr = std::shared_ptr<const Decoder>;

/// x = W z + b with W of full column rank.
class LinearDecoder final : public Decoder {
public:
    LinearDecoder(Eigen::MatrixXd weights, Eigen::VectorXd bias, Box domain);
    LinearDecoder(Eigen::MatrixXd weights, Eigen::VectorXd bias);
    explicit LinearDecoder(Eigen::MatrixXd weights);

    const Eigen::MatrixXd& weights() const { return weights_; }
    const Eigen::VectorXd& bias() const { return bias_; }
    std::string kind() const override { return "linear"; }

protected:
    Eigen::VectorXd decode_impl(const Eigen::VectorXd& z) const override { return weights_ * z + bias_; }
    Eigen::MatrixXd jacobian_impl(const Eigen::VectorXd&) const override { return weights_; }

private:
    Eigen::MatrixXd weights_;
    Eigen::VectorXd bias_;
};

/// Spherical chart (theta, phi) -> r (sin t cos p, sin t sin p, cos t).
/// The declared domain must stay inside theta in (eps, pi - eps),
/// phi in (-pi + eps, pi - eps), where the chart is injective.
class SphereChartDecoder final : public Decoder {
public:
    static constexpr double kChartMargin = 1e-3;

    explicit SphereChartDecoder(double radius);
    SphereChartDecoder(double radius, Box domain);

    /// Default sampling box: theta in [pi/2 - 0.7, pi/2 + 0.7], phi in [-1.2, 1.2].
    static Box default_domain();

    double radius() const { return radius_; }
    std::string kind() const override { return "sphere"; }

protected:
    Eigen::VectorXd decode_impl(const Eigen::VectorXd& z) const override;
    Eigen::MatrixXd jacobian_impl(const Eigen::VectorXd& z) const override;

private:
    double radius_;
};

/// Graph of a quadratic: z -> (z, sum_i c_i z_i^2).
class ParaboloidDecoder final : public Decoder {
public:
    explicit ParaboloidDecoder(Eigen::VectorXd coeffs);
    ParaboloidDecoder(Eigen::VectorXd coeffs, Box domain);

    const Eigen::VectorXd& coeffs() const { return coeffs_; }
    std::string kind() const override { return "paraboloid"; }

protected:
    Eigen::VectorXd decode_impl(const Eigen::VectorXd& z) const override;
    Eigen::MatrixXd jacobian_impl(const Eigen::VectorXd& z) const override;

private:
    Eigen::VectorXd coeffs_;
};

/// Dense feed-forward decoder. Not certified injective.
class MlpDecoder final : public Decoder {
public:
    explicit MlpDecoder(std::vector<DenseLayer> layers);
    MlpDecoder(std::vector<DenseLayer> layers, Box domain);

    const std::vector<DenseLayer>& layers() const { return layers_; }
    std::string kind() const override { return "mlp"; }
    bool injectivity_certified() const override { return false; }

protected:
    Eigen::VectorXd decode_impl(const Eigen::VectorXd& z) const override;
    Eigen::MatrixXd jacobian_impl(const Eigen::VectorXd& z) const override;
    void evaluate_impl(const Eigen::VectorXd& z, Eigen::VectorXd& x, Eigen::MatrixXd& jac) const override;

private:
    std::vector<DenseLayer> layers_;
};

/// f o A^{-1}: the same manifold seen through the latent coordinates A(z).
class ReparametrizedDecoder final : public Decoder {
public:
    ReparametrizedDecoder(DecoderPtr base, DiffeoPtr diffeo);

    const DecoderPtr& base() const { return base_; }
    const DiffeoPtr& diffeo() const { return diffeo_; }
    std::string kind() const override { return "reparametrized"; }
    bool injectivity_certified() const override { return base_->injectivity_certified(); }

protected:
    Eigen::VectorXd decode_impl(const Eigen::VectorXd& z) const override;
    Eigen::MatrixXd jacobian_impl(const Eigen::VectorXd& z) const override;
    void evaluate_impl(const Eigen::VectorXd& z, Eigen::VectorXd& x, Eigen::MatrixXd& jac) const override;

private:
    DecoderPtr base_;
    DiffeoPtr diffeo_;
};

/// Builds f o A^{-1}, so that decode(reparametrize(f, A), A(z)) = decode(f, z).
DecoderPtr reparametrize(DecoderPtr f, DiffeoPtr A);

inline Eigen::VectorXd decode(const Decoder& f, const Eigen::VectorXd& z) { return f.decode(z); }
inline Eigen::MatrixXd decoder_jacobian(const Decoder& f, const Eigen::VectorXd& z) { return f.jacobian(z); }

} // namespace idgeo
