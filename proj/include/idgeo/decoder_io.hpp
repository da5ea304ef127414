#pragma once

// JSON decoder documents.
//
//   {"latent_dim": 2, "ambient_dim": 3, "kind": "linear",
//    "weights": [[1, 0], [0, 1], [0, 0]], "bias": [0, 0, 0],
//    "domain": {"lower": [-1, -1], "upper": [1, 1]}}
//
// kind "sphere" carries "radius"; "paraboloid" carries "coeffs"; "mlp" carries
// "layers": [{"weights", "bias", "activation"}]; "reparametrized" carries
// "base" (a nested decoder document) and "diffeo". Diffeo documents have
// "kind": "affine" ("matrix", "offset"), "coupling" ("split" and either
// "layers" or "seed"/"hidden"/"scale") or "composition" ("parts"). Weight
// matrices are row-major: weights[i][j] multiplies input j into output i.

#include <string>
#include <string_view>

#include "json.hpp"

#include "idgeo/decoder.hpp"
#include "idgeo/diffeomorphism.hpp"

namespace idgeo {

/// Parses a decoder document. Errors are ParseError naming the field path.
DecoderPtr load_decoder(std::string_view document);
DecoderPtr decoder_from_json(const nlohmann::json& doc, const std::string& path = "$");

/// `dim` is the latent dimension the diffeomorphism must act on.
DiffeoPtr diffeo_from_json(const nlohmann::json& doc, int dim, const std::string& path = "$");

/// Reads an Eigen matrix from a row-major nested array.
Eigen::MatrixXd json_matrix(const nlohmann::json& value, const std::string& path);
Eigen::VectorXd json_vector(const nlohmann::json& value, const std::string& path);

} // namespace idgeo
