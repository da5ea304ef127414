#include "idgeo/decoder.hpp"

#include <cmath>
#include <numbers>

#include "idgeo/errors.hpp"

namespace idgeo {

Box Box::symmetric(int dim, double half_width) {
    return Box{Eigen::VectorXd::Constant(dim, -half_width), Eigen::VectorXd::Constant(dim, half_width)};
}

bool Box::contains(const Eigen::VectorXd& z, double slack) const {
    return z.size() == lower.size() && (z.array() >= lower.array() - slack).all() &&
           (z.array() <= upper.array() + slack).all();
}

// ---------------------------------------------------------------------------

Decoder::Decoder(int latent_dim, int ambient_dim, Box domain)
    : latent_dim_(latent_dim), ambient_dim_(ambient_dim), domain_(std::move(domain)) {
    if (latent_dim < 1) {
        throw ArgumentError("decoder latent_dim must be positive");
    }
    if (ambient_dim < latent_dim) {
        throw ArgumentError("decoder ambient_dim (" + std::to_string(ambient_dim) +
                            ") must be at least latent_dim (" + std::to_string(latent_dim) + ")");
    }
    if (domain_.lower.size() != latent_dim || domain_.upper.size() != latent_dim) {
        throw ArgumentError("decoder domain must have " + std::to_string(latent_dim) + " coordinates");
    }
    if (!(domain_.upper.array() > domain_.lower.array()).all()) {
        throw ArgumentError("decoder domain must have upper > lower in every coordinate");
    }
}

void Decoder::check_input(const Eigen::VectorXd& z, const char* op) const {
    if (z.size() != latent_dim_) {
        throw ArgumentError(std::string(op) + ": expected a " + std::to_string(latent_dim_) +
                            "-dimensional latent point, got " + std::to_string(z.size()));
    }
}

Eigen::VectorXd Decoder::decode(const Eigen::VectorXd& z) const {
    check_input(z, "decode");
    Eigen::VectorXd x = decode_impl(z);
    if (!x.allFinite()) {
        throw NumericError("decode: non-finite decoder output");
    }
    return x;
}

Eigen::MatrixXd Decoder::jacobian(const Eigen::VectorXd& z) const {
    check_input(z, "decoder_jacobian");
    Eigen::MatrixXd jac = jacobian_impl(z);
    if (!jac.allFinite()) {
        throw NumericError("decoder_jacobian: non-finite Jacobian");
    }
    return jac;
}

void Decoder::evaluate(const Eigen::VectorXd& z, Eigen::VectorXd& x, Eigen::MatrixXd& jac) const {
    check_input(z, "decode");
    evaluate_impl(z, x, jac);
    if (!x.allFinite() || !jac.allFinite()) {
        throw NumericError("decode: non-finite decoder output or Jacobian");
    }
}

void Decoder::evaluate_impl(const Eigen::VectorXd& z, Eigen::VectorXd& x, Eigen::MatrixXd& jac) const {
    x = decode_impl(z);
    jac = jacobian_impl(z);
}

// ---------------------------------------------------------------------------

namespace {

int checked_rows(const Eigen::MatrixXd& w) {
    if (w.size() == 0) throw ArgumentError("LinearDecoder: empty weight matrix");
    return static_cast<int>(w.rows());
}

} // namespace

LinearDecoder::LinearDecoder(Eigen::MatrixXd weights, Eigen::VectorXd bias, Box domain)
    : Decoder(static_cast<int>(weights.cols()), checked_rows(weights), std::move(domain)),
      weights_(std::move(weights)), bias_(std::move(bias)) {
    if (bias_.size() != weights_.rows()) {
        throw ArgumentError("LinearDecoder: bias size does not match weight rows");
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(weights_);
    const auto& s = svd.singularValues();
    if (!(s(s.size() - 1) > 1e-12 * s(0))) {
        throw ArgumentError("LinearDecoder: weight matrix must have full column rank");
    }
}

LinearDecoder::LinearDecoder(Eigen::MatrixXd weights, Eigen::VectorXd bias)
    : LinearDecoder(weights, std::move(bias), Box::symmetric(static_cast<int>(weights.cols()), 1.0)) {}

LinearDecoder::LinearDecoder(Eigen::MatrixXd weights)
    : LinearDecoder(weights, Eigen::VectorXd::Zero(weights.rows())) {}

// ---------------------------------------------------------------------------

Box SphereChartDecoder::default_domain() {
    const double half_pi = std::numbers::pi / 2.0;
    Box box;
    box.lower = Eigen::Vector2d(half_pi - 0.7, -1.2);
    box.upper = Eigen::Vector2d(half_pi + 0.7, 1.2);
    return box;
}

SphereChartDecoder::SphereChartDecoder(double radius) : SphereChartDecoder(radius, default_domain()) {}

SphereChartDecoder::SphereChartDecoder(double radius, Box domain)
    : Decoder(2, 3, std::move(domain)), radius_(radius) {
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw ArgumentError("SphereChartDecoder: radius must be positive");
    }
    const double pi = std::numbers::pi;
    const Box& box = this->domain();
    if (box.lower(0) < kChartMargin || box.upper(0) > pi - kChartMargin || box.lower(1) < -pi + kChartMargin ||
        box.upper(1) > pi - kChartMargin) {
        throw ArgumentError("SphereChartDecoder: domain leaves the injective chart region");
    }
}

Eigen::VectorXd SphereChartDecoder::decode_impl(const Eigen::VectorXd& z) const {
    const double st = std::sin(z(0)), ct = std::cos(z(0));
    const double sp = std::sin(z(1)), cp = std::cos(z(1));
    return radius_ * Eigen::Vector3d(st * cp, st * sp, ct);
}

Eigen::MatrixXd SphereChartDecoder::jacobian_impl(const Eigen::VectorXd& z) const {
    const double st = std::sin(z(0)), ct = std::cos(z(0));
    const double sp = std::sin(z(1)), cp = std::cos(z(1));
    Eigen::MatrixXd J(3, 2);
    J << ct * cp, -st * sp,
         ct * sp, st * cp,
         -st, 0.0;
    return radius_ * J;
}

// ---------------------------------------------------------------------------

ParaboloidDecoder::ParaboloidDecoder(Eigen::VectorXd coeffs)
    : ParaboloidDecoder(coeffs, Box::symmetric(static_cast<int>(coeffs.size()), 1.0)) {}

ParaboloidDecoder::ParaboloidDecoder(Eigen::VectorXd coeffs, Box domain)
    : Decoder(static_cast<int>(coeffs.size()), static_cast<int>(coeffs.size()) + 1, std::move(domain)),
      coeffs_(std::move(coeffs)) {
    if (!coeffs_.allFinite()) {
        throw ArgumentError("ParaboloidDecoder: non-finite coefficients");
    }
}

Eigen::VectorXd ParaboloidDecoder::decode_impl(const Eigen::VectorXd& z) const {
    Eigen::VectorXd x(z.size() + 1);
    x.head(z.size()) = z;
    x(z.size()) = coeffs_.dot(z.cwiseProduct(z));
    return x;
}

Eigen::MatrixXd ParaboloidDecoder::jacobian_impl(const Eigen::VectorXd& z) const {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(z.size() + 1, z.size());
    J.topRows(z.size()).setIdentity();
    J.row(z.size()) = 2.0 * coeffs_.cwiseProduct(z).transpose();
    return J;
}

// ---------------------------------------------------------------------------

namespace {

std::pair<int, int> mlp_shape(const std::vector<DenseLayer>& layers) {
    if (layers.empty()) throw ArgumentError("MlpDecoder: needs at least one layer");
    return {static_cast<int>(layers.front().in_dim()), static_cast<int>(layers.back().out_dim())};
}

} // namespace

MlpDecoder::MlpDecoder(std::vector<DenseLayer> layers)
    : MlpDecoder(layers, Box::symmetric(mlp_shape(layers).first, 1.0)) {}

MlpDecoder::MlpDecoder(std::vector<DenseLayer> layers, Box domain)
    : Decoder(mlp_shape(layers).first, mlp_shape(layers).second, std::move(domain)), layers_(std::move(layers)) {
    validate_layers(layers_, latent_dim(), ambient_dim());
}

Eigen::VectorXd MlpDecoder::decode_impl(const Eigen::VectorXd& z) const { return mlp_forward(layers_, z); }

Eigen::MatrixXd MlpDecoder::jacobian_impl(const Eigen::VectorXd& z) const {
    Eigen::VectorXd x;
    Eigen::MatrixXd J;
    mlp_forward_jacobian(layers_, z, x, J);
    return J;
}

void MlpDecoder::evaluate_impl(const Eigen::VectorXd& z, Eigen::VectorXd& x, Eigen::MatrixXd& jac) const {
    mlp_forward_jacobian(layers_, z, x, jac);
}

// ---------------------------------------------------------------------------

namespace {

// Bounding box of A applied to a grid on the faces of `box`.
Box image_bounds(const Box& box, const Diffeomorphism& A) {
    const Eigen::Index d = box.dim();
    const int per_axis = d <= 3 ? 17 : 2;
    Eigen::VectorXd lo = Eigen::VectorXd::Constant(d, INFINITY);
    Eigen::VectorXd hi = Eigen::VectorXd::Constant(d, -INFINITY);
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    Eigen::VectorXd z(d);
    while (true) {
        bool on_face = false;
        for (Eigen::Index i = 0; i < d; ++i) {
            const int k = idx[static_cast<std::size_t>(i)];
            on_face = on_face || k == 0 || k == per_axis - 1;
            z(i) = box.lower(i) + (box.upper(i) - box.lower(i)) * k / (per_axis - 1);
        }
        if (on_face) {
            const Eigen::VectorXd y = A.apply(z);
            lo = lo.cwiseMin(y);
            hi = hi.cwiseMax(y);
        }
        Eigen::Index i = 0;
        while (i < d && ++idx[static_cast<std::size_t>(i)] == per_axis) {
            idx[static_cast<std::size_t>(i)] = 0;
            ++i;
        }
        if (i == d) break;
    }
    return Box{lo, hi};
}

const Decoder& checked_base(const DecoderPtr& base, const DiffeoPtr& diffeo) {
    if (!base) throw ArgumentError("reparametrize: null decoder");
    if (!diffeo) throw ArgumentError("reparametrize: null diffeomorphism");
    if (diffeo->dim() != base->latent_dim()) {
        throw ArgumentError("reparametrize: diffeomorphism dimension " + std::to_string(diffeo->dim()) +
                            " does not match decoder latent_dim " + std::to_string(base->latent_dim()));
    }
    return *base;
}

} // namespace

ReparametrizedDecoder::ReparametrizedDecoder(DecoderPtr base, DiffeoPtr diffeo)
    : Decoder(checked_base(base, diffeo).latent_dim(), checked_base(base, diffeo).ambient_dim(),
              image_bounds(checked_base(base, diffeo).domain(), *diffeo)),
      base_(std::move(base)), diffeo_(std::move(diffeo)) {}

Eigen::VectorXd ReparametrizedDecoder::decode_impl(const Eigen::VectorXd& z) const {
    return base_->decode(diffeo_->invert(z));
}

Eigen::MatrixXd ReparametrizedDecoder::jacobian_impl(const Eigen::VectorXd& z) const {
    return base_->jacobian(diffeo_->invert(z)) * diffeo_->inverse_jacobian(z);
}

void ReparametrizedDecoder::evaluate_impl(const Eigen::VectorXd& z, Eigen::VectorXd& x,
                                          Eigen::MatrixXd& jac) const {
    Eigen::MatrixXd base_jac;
    base_->evaluate(diffeo_->invert(z), x, base_jac);
    jac = base_jac * diffeo_->inverse_jacobian(z);
}

DecoderPtr reparametrize(DecoderPtr f, DiffeoPtr A) {
    return std::make_shared<const ReparametrizedDecoder>(std::move(f), std::move(A));
}

} // namespace idgeo
