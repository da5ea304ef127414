#pragma once

#include <Eigen/Dense>

#include <string>
#include <string_view>
#include <vector>

namespace idgeo {

enum class Activation { Linear, Tanh, Elu };

/// Parses "linear", "tanh" or "elu"; throws ParseError otherwise.
Activation parse_activation(std::string_view name, const std::string& field_path = "activation");
std::string to_string(Activation activation);

/// y = act(W x + b). weights(i, j) multiplies input j into output i.
struct DenseLayer {
    Eigen::MatrixXd weights;
    Eigen::VectorXd bias;
    Activation activation = Activation::Linear;

    Eigen::Index in_dim() const { return weights.cols(); }
    Eigen::Index out_dim() const { return weights.rows(); }
};

/// Checks that bias sizes match and consecutive layers chain; throws ArgumentError.
void validate_layers(const std::vector<DenseLayer>& layers, Eigen::Index in_dim, Eigen::Index out_dim);

Eigen::VectorXd mlp_forward(const std::vector<DenseLayer>& layers, const Eigen::VectorXd& x);

/// Forward pass with the analytic input Jacobian accumulated layer by layer.
void mlp_forward_jacobian(const std::vector<DenseLayer>& layers, const Eigen::VectorXd& x,
                          Eigen::VectorXd& y, Eigen::MatrixXd& jacobian);

} // namespace idgeo
