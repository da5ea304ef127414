#include "idgeo/dense_layer.hpp"

#include <cmath>

#include "idgeo/errors.hpp"

namespace idgeo {

namespace {

void activate(Activation act, Eigen::VectorXd& v) {
    switch (act) {
    case Activation::Linear: break;
    case Activation::Tanh: v = v.array().tanh(); break;
    case Activation::Elu:
        v = (v.array() > 0.0).select(v.array(), v.array().exp() - 1.0);
        break;
    }
}

// Derivative of the activation written in terms of the pre-activation.
Eigen::VectorXd activation_slope(Activation act, const Eigen::VectorXd& pre) {
    switch (act) {
    case Activation::Linear: return Eigen::VectorXd::Ones(pre.size());
    case Activation::Tanh: return 1.0 - pre.array().tanh().square();
    case Activation::Elu: return (pre.array() > 0.0).select(1.0, pre.array().exp());
    }
    return Eigen::VectorXd::Ones(pre.size());
}

} // namespace

Activation parse_activation(std::string_view name, const std::string& field_path) {
    if (name == "linear") return Activation::Linear;
    if (name == "tanh") return Activation::Tanh;
    if (name == "elu") return Activation::Elu;
    throw ParseError(field_path, "unknown activation \"" + std::string(name) +
                                     "\" (expected linear, tanh or elu)");
}

std::string to_string(Activation activation) {
    switch (activation) {
    case Activation::Linear: return "linear";
    case Activation::Tanh: return "tanh";
    case Activation::Elu: return "elu";
    }
    return "linear";
}

void validate_layers(const std::vector<DenseLayer>& layers, Eigen::Index in_dim, Eigen::Index out_dim) {
    if (layers.empty()) {
        throw ArgumentError("network needs at least one layer");
    }
    Eigen::Index width = in_dim;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& layer = layers[i];
        const std::string where = "layer " + std::to_string(i) + ": ";
        if (layer.in_dim() != width) {
            throw ArgumentError(where + "expects " + std::to_string(layer.in_dim()) +
                                " inputs but receives " + std::to_string(width));
        }
        if (layer.bias.size() != layer.out_dim()) {
            throw ArgumentError(where + "bias size " + std::to_string(layer.bias.size()) +
                                " does not match " + std::to_string(layer.out_dim()) + " outputs");
        }
        width = layer.out_dim();
    }
    if (width != out_dim) {
        throw ArgumentError("network output size " + std::to_string(width) + " does not match " +
                            std::to_string(out_dim));
    }
}

Eigen::VectorXd mlp_forward(const std::vector<DenseLayer>& layers, const Eigen::VectorXd& x) {
    Eigen::VectorXd h = x;
    for (const auto& layer : layers) {
        Eigen::VectorXd pre = layer.weights * h + layer.bias;
        activate(layer.activation, pre);
        h = std::move(pre);
    }
    return h;
}

void mlp_forward_jacobian(const std::vector<DenseLayer>& layers, const Eigen::VectorXd& x,
                          Eigen::VectorXd& y, Eigen::MatrixXd& jacobian) {
    Eigen::VectorXd h = x;
    jacobian = Eigen::MatrixXd::Identity(x.size(), x.size());
    for (const auto& layer : layers) {
        Eigen::VectorXd pre = layer.weights * h + layer.bias;
        jacobian = activation_slope(layer.activation, pre).asDiagonal() * (layer.weights * jacobian);
        activate(layer.activation, pre);
        h = std::move(pre);
    }
    y = std::move(h);
}

} // namespace idgeo
