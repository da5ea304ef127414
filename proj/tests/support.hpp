#pragma once

// Shared fixtures for the unit and acceptance tests.

#include <Eigen/Dense>

#include <memory>
#include <random>
#include <vector>

#include "idgeo/decoder.hpp"
#include "idgeo/diffeomorphism.hpp"

namespace idgeo::testing {

inline Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng,
                                     double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
    return m;
}

inline Eigen::VectorXd uniform_in_box(const Box& box, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::VectorXd z(box.dim());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = box.lower(i) + u(rng) * (box.upper(i) - box.lower(i));
    return z;
}

/// d -> hidden (tanh) -> hidden (elu) -> D (linear).
inline DecoderPtr random_mlp(int d, int D, int hidden, std::mt19937_64& rng, double scale = 0.7) {
    std::vector<DenseLayer> layers;
    layers.push_back({normal_matrix(hidden, d, rng, scale), normal_matrix(hidden, 1, rng, scale), Activation::Tanh});
    layers.push_back(
        {normal_matrix(hidden, hidden, rng, scale), normal_matrix(hidden, 1, rng, scale), Activation::Elu});
    layers.push_back({normal_matrix(D, hidden, rng, scale), normal_matrix(D, 1, rng, scale), Activation::Linear});
    return std::make_shared<const MlpDecoder>(std::move(layers));
}

/// Well-conditioned random affine map: rotation-like matrix with bounded stretch.
inline DiffeoPtr random_affine(int d, std::mt19937_64& rng, double stretch = 0.5) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(d, d) + normal_matrix(d, d, rng, stretch / std::sqrt(d));
    while (Eigen::JacobiSVD<Eigen::MatrixXd>(M).singularValues().minCoeff() < 0.3) {
        M = Eigen::MatrixXd::Identity(d, d) + normal_matrix(d, d, rng, stretch / std::sqrt(d));
    }
    return std::make_shared<const AffineDiffeo>(M, normal_matrix(d, 1, rng, 0.2));
}

inline Eigen::MatrixXd fd_jacobian(const Decoder& f, const Eigen::VectorXd& z, double h = 1e-6) {
    Eigen::MatrixXd J(f.ambient_dim(), f.latent_dim());
    for (int j = 0; j < f.latent_dim(); ++j) {
        Eigen::VectorXd zp = z, zm = z;
        zp(j) += h;
        zm(j) -= h;
        J.col(j) = (f.decode(zp) - f.decode(zm)) / (2 * h);
    }
    return J;
}

inline double relative_error(const Eigen::MatrixXd& approx, const Eigen::MatrixXd& exact) {
    const double scale = std::max(exact.norm(), 1e-12);
    return (approx - exact).norm() / scale;
}

} // namespace idgeo::testing
