#include "idgeo/decoder_io.hpp"

#include <optional>
#include <random>
#include <set>

#include "idgeo/errors.hpp"

namespace idgeo {

using nlohmann::json;

namespace {

void expect_object(const json& doc, const std::string& path) {
    if (!doc.is_object()) throw ParseError(path, "expected an object");
}

void reject_unknown_keys(const json& doc, const std::string& path, const std::set<std::string>& allowed) {
    for (const auto& [key, value] : doc.items()) {
        if (!allowed.count(key)) throw ParseError(path + "." + key, "unknown field");
    }
}

const json& require(const json& doc, const std::string& key, const std::string& path) {
    const auto it = doc.find(key);
    if (it == doc.end()) throw ParseError(path + "." + key, "missing required field");
    return *it;
}

int json_int(const json& value, const std::string& path) {
    if (!value.is_number_integer()) throw ParseError(path, "expected an integer");
    return value.get<int>();
}

double json_number(const json& value, const std::string& path) {
    if (!value.is_number()) throw ParseError(path, "expected a number");
    return value.get<double>();
}

std::string json_string(const json& value, const std::string& path) {
    if (!value.is_string()) throw ParseError(path, "expected a string");
    return value.get<std::string>();
}

DenseLayer parse_layer(const json& doc, const std::string& path) {
    expect_object(doc, path);
    reject_unknown_keys(doc, path, {"weights", "bias", "activation"});
    DenseLayer layer;
    layer.weights = json_matrix(require(doc, "weights", path), path + ".weights");
    if (doc.contains("bias")) {
        layer.bias = json_vector(doc.at("bias"), path + ".bias");
    } else {
        layer.bias = Eigen::VectorXd::Zero(layer.weights.rows());
    }
    if (doc.contains("activation")) {
        layer.activation = parse_activation(json_string(doc.at("activation"), path + ".activation"),
                                            path + ".activation");
    }
    return layer;
}

std::vector<DenseLayer> parse_layers(const json& value, const std::string& path) {
    if (!value.is_array() || value.empty()) throw ParseError(path, "expected a nonempty array of layers");
    std::vector<DenseLayer> layers;
    for (std::size_t i = 0; i < value.size(); ++i) {
        layers.push_back(parse_layer(value[i], path + "[" + std::to_string(i) + "]"));
    }
    return layers;
}

Box parse_box(const json& doc, const std::string& path, int dim) {
    expect_object(doc, path);
    reject_unknown_keys(doc, path, {"lower", "upper"});
    Box box{json_vector(require(doc, "lower", path), path + ".lower"),
            json_vector(require(doc, "upper", path), path + ".upper")};
    if (box.lower.size() != dim || box.upper.size() != dim) {
        throw ParseError(path, "domain bounds must have " + std::to_string(dim) + " entries");
    }
    return box;
}

// Runs a constructor and reports its ArgumentError as a ParseError at `path`.
template <typename Fn>
auto construct_at(const std::string& path, Fn&& fn) {
    try {
        return fn();
    } catch (const ArgumentError& e) {
        throw ParseError(path, e.what());
    }
}

} // namespace

Eigen::MatrixXd json_matrix(const json& value, const std::string& path) {
    if (!value.is_array() || value.empty()) throw ParseError(path, "expected a nonempty array of rows");
    const std::size_t rows = value.size();
    if (!value[0].is_array() || value[0].empty()) throw ParseError(path + "[0]", "expected a nonempty row");
    const std::size_t cols = value[0].size();
    Eigen::MatrixXd m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        const std::string row_path = path + "[" + std::to_string(i) + "]";
        if (!value[i].is_array() || value[i].size() != cols) {
            throw ParseError(row_path, "expected a row of " + std::to_string(cols) + " numbers");
        }
        for (std::size_t j = 0; j < cols; ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                json_number(value[i][j], row_path + "[" + std::to_string(j) + "]");
        }
    }
    return m;
}

Eigen::VectorXd json_vector(const json& value, const std::string& path) {
    if (!value.is_array()) throw ParseError(path, "expected an array of numbers");
    Eigen::VectorXd v(static_cast<Eigen::Index>(value.size()));
    for (std::size_t i = 0; i < value.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = json_number(value[i], path + "[" + std::to_string(i) + "]");
    }
    return v;
}

DiffeoPtr diffeo_from_json(const json& doc, int dim, const std::string& path) {
    expect_object(doc, path);
    const std::string kind = json_string(require(doc, "kind", path), path + ".kind");
    if (kind == "affine") {
        reject_unknown_keys(doc, path, {"kind", "matrix", "offset"});
        Eigen::MatrixXd M = json_matrix(require(doc, "matrix", path), path + ".matrix");
        if (M.rows() != dim || M.cols() != dim) {
            throw ParseError(path + ".matrix", "expected a " + std::to_string(dim) + "x" + std::to_string(dim) +
                                                   " matrix");
        }
        Eigen::VectorXd c = doc.contains("offset") ? json_vector(doc.at("offset"), path + ".offset")
                                                   : Eigen::VectorXd::Zero(dim);
        return construct_at(path, [&]() -> DiffeoPtr { return std::make_shared<const AffineDiffeo>(M, c); });
    }
    if (kind == "coupling") {
        reject_unknown_keys(doc, path, {"kind", "split", "layers", "seed", "hidden", "scale"});
        const int split = json_int(require(doc, "split", path), path + ".split");
        if (doc.contains("layers")) {
            auto layers = parse_layers(doc.at("layers"), path + ".layers");
            return construct_at(path, [&]() -> DiffeoPtr {
                return std::make_shared<const CouplingDiffeo>(dim, split, std::move(layers));
            });
        }
        const json& seed_field = require(doc, "seed", path);
        if (!seed_field.is_number_unsigned()) throw ParseError(path + ".seed", "expected a nonnegative integer");
        std::mt19937_64 rng(seed_field.get<std::uint64_t>());
        const int hidden = doc.contains("hidden") ? json_int(doc.at("hidden"), path + ".hidden") : 8;
        const double scale = doc.contains("scale") ? json_number(doc.at("scale"), path + ".scale") : 0.5;
        return construct_at(path, [&]() -> DiffeoPtr { return CouplingDiffeo::random(dim, split, hidden, scale, rng); });
    }
    if (kind == "composition") {
        reject_unknown_keys(doc, path, {"kind", "parts"});
        const json& parts = require(doc, "parts", path);
        if (!parts.is_array() || parts.empty()) throw ParseError(path + ".parts", "expected a nonempty array");
        std::vector<DiffeoPtr> built;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            built.push_back(diffeo_from_json(parts[i], dim, path + ".parts[" + std::to_string(i) + "]"));
        }
        return construct_at(path, [&]() -> DiffeoPtr { return std::make_shared<const CompositionDiffeo>(built); });
    }
    throw ParseError(path + ".kind", "unknown diffeomorphism kind \"" + kind + "\"");
}

DecoderPtr decoder_from_json(const json& doc, const std::string& path) {
    expect_object(doc, path);
    const int latent_dim = json_int(require(doc, "latent_dim", path), path + ".latent_dim");
    const int ambient_dim = json_int(require(doc, "ambient_dim", path), path + ".ambient_dim");
    const std::string kind = json_string(require(doc, "kind", path), path + ".kind");
    if (latent_dim < 1) throw ParseError(path + ".latent_dim", "must be positive");
    if (ambient_dim < latent_dim) throw ParseError(path + ".ambient_dim", "must be at least latent_dim");

    std::optional<Box> domain;
    if (doc.contains("domain")) domain = parse_box(doc.at("domain"), path + ".domain", latent_dim);

    DecoderPtr decoder;
    if (kind == "linear") {
        reject_unknown_keys(doc, path, {"latent_dim", "ambient_dim", "kind", "domain", "weights", "bias"});
        Eigen::MatrixXd W = json_matrix(require(doc, "weights", path), path + ".weights");
        if (W.rows() != ambient_dim || W.cols() != latent_dim) {
            throw ParseError(path + ".weights", "expected an ambient_dim x latent_dim matrix (" +
                                                    std::to_string(ambient_dim) + "x" + std::to_string(latent_dim) + ")");
        }
        Eigen::VectorXd b = doc.contains("bias") ? json_vector(doc.at("bias"), path + ".bias")
                                                 : Eigen::VectorXd::Zero(ambient_dim);
        decoder = construct_at(path, [&]() -> DecoderPtr {
            return domain ? std::make_shared<const LinearDecoder>(W, b, *domain)
                          : std::make_shared<const LinearDecoder>(W, b);
        });
    } else if (kind == "sphere") {
        reject_unknown_keys(doc, path, {"latent_dim", "ambient_dim", "kind", "domain", "radius"});
        const double r = doc.contains("radius") ? json_number(doc.at("radius"), path + ".radius") : 1.0;
        decoder = construct_at(path, [&]() -> DecoderPtr {
            return domain ? std::make_shared<const SphereChartDecoder>(r, *domain)
                          : std::make_shared<const SphereChartDecoder>(r);
        });
    } else if (kind == "paraboloid") {
        reject_unknown_keys(doc, path, {"latent_dim", "ambient_dim", "kind", "domain", "coeffs"});
        Eigen::VectorXd c = json_vector(require(doc, "coeffs", path), path + ".coeffs");
        if (c.size() != latent_dim) throw ParseError(path + ".coeffs", "expected latent_dim coefficients");
        decoder = construct_at(path, [&]() -> DecoderPtr {
            return domain ? std::make_shared<const ParaboloidDecoder>(c, *domain)
                          : std::make_shared<const ParaboloidDecoder>(c);
        });
    } else if (kind == "mlp") {
        reject_unknown_keys(doc, path, {"latent_dim", "ambient_dim", "kind", "domain", "layers"});
        auto layers = parse_layers(require(doc, "layers", path), path + ".layers");
        if (layers.front().in_dim() != latent_dim) {
            throw ParseError(path + ".layers[0].weights", "first layer must take latent_dim inputs");
        }
        if (layers.back().out_dim() != ambient_dim) {
            throw ParseError(path + ".layers[" + std::to_string(layers.size() - 1) + "].weights",
                             "last layer must produce ambient_dim outputs");
        }
        decoder = construct_at(path + ".layers", [&]() -> DecoderPtr {
            return domain ? std::make_shared<const MlpDecoder>(layers, *domain)
                          : std::make_shared<const MlpDecoder>(layers);
        });
    } else if (kind == "reparametrized") {
        reject_unknown_keys(doc, path, {"latent_dim", "ambient_dim", "kind", "base", "diffeo"});
        DecoderPtr base = decoder_from_json(require(doc, "base", path), path + ".base");
        DiffeoPtr diffeo = diffeo_from_json(require(doc, "diffeo", path), base->latent_dim(), path + ".diffeo");
        decoder = construct_at(path, [&] { return reparametrize(base, diffeo); });
    } else {
        throw ParseError(path + ".kind", "unknown decoder kind \"" + kind + "\"");
    }

    if (decoder->latent_dim() != latent_dim) {
        throw ParseError(path + ".latent_dim", "does not match the decoder (" + std::to_string(decoder->latent_dim()) + ")");
    }
    if (decoder->ambient_dim() != ambient_dim) {
        throw ParseError(path + ".ambient_dim", "does not match the decoder (" + std::to_string(decoder->ambient_dim()) + ")");
    }
    return decoder;
}

DecoderPtr load_decoder(std::string_view document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw ParseError("$", std::string("malformed JSON: ") + e.what());
    }
    return decoder_from_json(doc, "$");
}

} // namespace idgeo
