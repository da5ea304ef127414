#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "idgeo/decoder.hpp"
#include "idgeo/decoder_io.hpp"
#include "idgeo/diffeomorphism.hpp"
#include "idgeo/metric.hpp"
#include "support.hpp"

using namespace idgeo;
using namespace idgeo::testing;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;
using std::numbers::pi;

namespace {

struct Variant {
    const char* name;
    DecoderPtr decoder;
};

std::vector<Variant> all_variants(std::mt19937_64& rng) {
    MatrixXd W = normal_matrix(5, 2, rng);
    auto linear = std::make_shared<const LinearDecoder>(W, normal_matrix(5, 1, rng));
    auto sphere = std::make_shared<const SphereChartDecoder>(1.5);
    auto paraboloid = std::make_shared<const ParaboloidDecoder>(Vector2d(0.7, -0.4));
    auto mlp = random_mlp(2, 4, 8, rng);
    auto coupling = CouplingDiffeo::random(2, 1, 8, 0.5, rng);
    auto mixed = std::make_shared<const CompositionDiffeo>(std::vector<DiffeoPtr>{random_affine(2, rng), coupling});
    return {
        {"linear", linear},
        {"sphere", sphere},
        {"paraboloid", paraboloid},
        {"mlp", mlp},
        {"sphere o affine^-1", reparametrize(sphere, random_affine(2, rng))},
        {"mlp o coupling^-1", reparametrize(mlp, coupling)},
        {"sphere o mixed^-1", reparametrize(sphere, mixed)},
    };
}

} // namespace

TEST(Decode, LinearIsMatrixProduct) {
    MatrixXd W(3, 2);
    W << 1, 2, 3, 4, 5, 6;
    const LinearDecoder f(W);
    EXPECT_EQ(decode(f, Vector2d(1.0, -1.0)), Eigen::Vector3d(-1, -1, -1));
    EXPECT_EQ(decoder_jacobian(f, Vector2d(0.3, 0.1)), W);
}

TEST(Decode, SphereChartEquatorPoint) {
    const SphereChartDecoder f(1.0);
    const VectorXd x = f.decode(Vector2d(pi / 2, 0.0));
    EXPECT_NEAR(x(0), 1.0, 1e-15);
    EXPECT_NEAR(x(1), 0.0, 1e-15);
    EXPECT_NEAR(x(2), 0.0, 1e-15);
}

TEST(Decode, RejectsDimensionMismatch) {
    const SphereChartDecoder f(1.0);
    EXPECT_THROW(f.decode(Eigen::Vector3d(1, 1, 1)), ArgumentError);
    EXPECT_THROW(f.jacobian(VectorXd(1)), ArgumentError);
}

TEST(Decode, NonFiniteOutputIsNumericError) {
    const LinearDecoder f(MatrixXd::Identity(2, 2));
    EXPECT_THROW(f.decode(Vector2d(std::nan(""), 0.0)), NumericError);
    const LinearDecoder huge(1e308 * MatrixXd::Identity(2, 2));
    EXPECT_THROW(huge.decode(Vector2d(10.0, 0.0)), NumericError);
}

TEST(Decode, ConstructionEnforcesInjectivity) {
    MatrixXd rank_one(3, 2);
    rank_one << 1, 2, 2, 4, 3, 6;
    EXPECT_THROW(LinearDecoder{rank_one}, ArgumentError);
    EXPECT_THROW(LinearDecoder(MatrixXd::Identity(2, 3)), ArgumentError);
    EXPECT_THROW(SphereChartDecoder(1.0, Box{Vector2d(0.0, -1.0), Vector2d(1.0, 1.0)}), ArgumentError);
    EXPECT_THROW(SphereChartDecoder(1.0, Box{Vector2d(1.0, -3.2), Vector2d(2.0, 1.0)}), ArgumentError);
    EXPECT_THROW(SphereChartDecoder(-1.0), ArgumentError);
    std::mt19937_64 rng(1);
    EXPECT_FALSE(random_mlp(2, 3, 4, rng)->injectivity_certified());
    EXPECT_TRUE(SphereChartDecoder(1.0).injectivity_certified());
}

TEST(Jacobian, SingleTanhLayerAtOriginEqualsWeights) {
    MatrixXd W(3, 2);
    W << 0.5, -1.0, 2.0, 0.25, -0.75, 1.5;
    const MlpDecoder f({DenseLayer{W, VectorXd::Zero(3), Activation::Tanh}});
    EXPECT_LE((f.jacobian(VectorXd::Zero(2)) - W).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Jacobian, MatchesFiniteDifferencesForEveryVariant) {
    std::mt19937_64 rng(2024);
    for (const auto& [name, f] : all_variants(rng)) {
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const VectorXd z = uniform_in_box(f->domain(), rng);
            worst = std::max(worst, relative_error(fd_jacobian(*f, z), f->jacobian(z)));
        }
        EXPECT_LE(worst, 1e-6) << name;
    }
}

TEST(Jacobian, EvaluateAgreesWithSeparateCalls) {
    std::mt19937_64 rng(5);
    for (const auto& [name, f] : all_variants(rng)) {
        const VectorXd z = uniform_in_box(f->domain(), rng);
        VectorXd x;
        MatrixXd J;
        f->evaluate(z, x, J);
        EXPECT_LE((x - f->decode(z)).cwiseAbs().maxCoeff(), 1e-14) << name;
        EXPECT_LE((J - f->jacobian(z)).cwiseAbs().maxCoeff(), 1e-14) << name;
    }
}

TEST(Pullback, IdentityAndLinear) {
    const LinearDecoder id(MatrixXd::Identity(3, 3));
    EXPECT_EQ(pullback_metric(id, Eigen::Vector3d(0.1, 0.2, 0.3)).matrix(), MatrixXd::Identity(3, 3));

    std::mt19937_64 rng(3);
    const MatrixXd W = normal_matrix(4, 2, rng);
    const LinearDecoder f(W);
    for (int i = 0; i < 5; ++i) {
        const VectorXd z = uniform_in_box(f.domain(), rng);
        EXPECT_LE((pullback_metric(f, z).matrix() - W.transpose() * W).cwiseAbs().maxCoeff(), 1e-14);
    }
}

TEST(Pullback, SphereFirstFundamentalForm) {
    for (double r : {1.0, 2.0}) {
        const SphereChartDecoder f(r);
        for (double theta : {0.9, pi / 2, 2.1}) {
            for (double phi : {-1.0, 0.0, 0.6}) {
                const MatrixXd G = pullback_metric(f, Vector2d(theta, phi)).matrix();
                const double s = std::sin(theta);
                EXPECT_NEAR(G(0, 0), r * r, 1e-14);
                EXPECT_NEAR(G(1, 1), r * r * s * s, 1e-14);
                EXPECT_NEAR(G(0, 1), 0.0, 1e-14);
                EXPECT_EQ(G(0, 1), G(1, 0));
            }
        }
    }
}

TEST(Pullback, SymmetricPositiveDefinite) {
    std::mt19937_64 rng(8);
    for (const auto& [name, f] : all_variants(rng)) {
        for (int i = 0; i < 20; ++i) {
            const VectorXd z = uniform_in_box(f->domain(), rng);
            const MatrixXd J = f->jacobian(z);
            const MatrixXd G = pullback_metric(*f, z).matrix();
            EXPECT_EQ(G, G.transpose()) << name;
            if (min_singular_value(J) > 1e-8) {
                EXPECT_GT(Eigen::SelfAdjointEigenSolver<MatrixXd>(G).eigenvalues().minCoeff(), 0.0) << name;
            }
        }
    }
}

TEST(Pullback, VerifyModeRejectsRankDeficiency) {
    const SphereChartDecoder sphere(1.0, Box{Vector2d(1e-2, -1.0), Vector2d(3.0, 1.0)});
    // sin(theta) = 1e-9 is outside the declared box, but the metric is still computable
    EXPECT_THROW(pullback_metric(sphere, Vector2d(1e-9, 0.0), {true, 1e-8}), RankDeficiencyError);
    EXPECT_NO_THROW(pullback_metric(sphere, Vector2d(1e-9, 0.0), {false, 1e-8}));
}

TEST(MetricTensor, RejectsAsymmetric) {
    MatrixXd g(2, 2);
    g << 1, 0.5, 0.4, 1;
    EXPECT_THROW(MetricTensor{g}, ArgumentError);
    EXPECT_THROW(MetricTensor{MatrixXd::Identity(2, 3)}, ArgumentError);
}

TEST(TangentNorm, Examples) {
    const MetricTensor I(MatrixXd::Identity(2, 2));
    EXPECT_DOUBLE_EQ(tangent_norm(I, Vector2d(3, 4)), 5.0);
    EXPECT_EQ(tangent_norm(I, Vector2d(0, 0)), 0.0);
    const double s = std::sin(pi / 4);
    const MetricTensor G(Eigen::Vector2d(1.0, s * s).asDiagonal().toDenseMatrix());
    EXPECT_NEAR(tangent_norm(G, Vector2d(0, 1)), s, 1e-15);
    EXPECT_THROW(tangent_norm(G, Eigen::Vector3d(0, 1, 0)), ArgumentError);
}

TEST(TangentAngle, Examples) {
    const MetricTensor I(MatrixXd::Identity(2, 2));
    EXPECT_NEAR(tangent_angle(I, Vector2d(1, 0), Vector2d(0, 1)), pi / 2, 1e-15);
    EXPECT_EQ(tangent_angle(I, Vector2d(0.3, 0.7), Vector2d(0.3, 0.7)), 0.0);
    const MetricTensor G(Eigen::Vector2d(2.0, 1.0).asDiagonal().toDenseMatrix());
    EXPECT_NEAR(tangent_angle(G, Vector2d(1, 0), Vector2d(1, 1)), std::acos(2.0 / (std::sqrt(2.0) * std::sqrt(3.0))),
                1e-15);
    EXPECT_THROW(tangent_angle(I, Vector2d(0, 0), Vector2d(1, 0)), ArgumentError);
}

TEST(Curvature, LinearIsFlat) {
    std::mt19937_64 rng(9);
    const LinearDecoder f(normal_matrix(3, 2, rng));
    for (int i = 0; i < 10; ++i) EXPECT_LE(std::abs(gaussian_curvature_2d(f, uniform_in_box(f.domain(), rng))), 1e-6);
}

TEST(Curvature, SphereIsInverseRadiusSquared) {
    EXPECT_NEAR(gaussian_curvature_2d(SphereChartDecoder(1.0), Vector2d(pi / 2, 0.0)), 1.0, 0.02);
    EXPECT_NEAR(gaussian_curvature_2d(SphereChartDecoder(2.0), Vector2d(pi / 2, 0.3)), 0.25, 0.02 * 0.25);
    EXPECT_NEAR(gaussian_curvature_2d(SphereChartDecoder(1.0), Vector2d(1.1, -0.5)), 1.0, 0.02);
}

TEST(Curvature, ParaboloidAtApex) {
    // graph of c1 x^2 + c2 y^2 has K = 4 c1 c2 at the origin
    const ParaboloidDecoder f(Vector2d(0.5, 1.5));
    EXPECT_NEAR(gaussian_curvature_2d(f, Vector2d(0.0, 0.0)), 3.0, 1e-4);
}

TEST(Curvature, InvariantUnderReparametrization) {
    std::mt19937_64 rng(10);
    auto sphere = std::make_shared<const SphereChartDecoder>(1.0);
    auto A = random_affine(2, rng);
    const auto g = reparametrize(sphere, A);
    const VectorXd z(Vector2d(1.4, 0.2));
    EXPECT_NEAR(gaussian_curvature_2d(*g, A->apply(z)), 1.0, 0.02);
}

TEST(Curvature, RequiresTwoDimensions) {
    EXPECT_THROW(gaussian_curvature_2d(LinearDecoder(MatrixXd::Identity(3, 3)), VectorXd::Zero(3)), UnsupportedError);
}

TEST(Reparametrize, IdentityLeavesDecodeUnchanged) {
    std::mt19937_64 rng(11);
    auto f = random_mlp(2, 3, 6, rng);
    const auto g = reparametrize(f, AffineDiffeo::identity(2));
    for (int i = 0; i < 20; ++i) {
        const VectorXd z = uniform_in_box(f->domain(), rng);
        EXPECT_EQ(g->decode(z), f->decode(z));
    }
}

TEST(Reparametrize, LinearWithAffineIsLinear) {
    std::mt19937_64 rng(12);
    const MatrixXd W = normal_matrix(4, 3, rng);
    MatrixXd M = normal_matrix(3, 3, rng) + 2 * MatrixXd::Identity(3, 3);
    auto f = std::make_shared<const LinearDecoder>(W);
    const auto g = reparametrize(f, std::make_shared<const AffineDiffeo>(M, VectorXd::Zero(3)));
    const LinearDecoder oracle(W * M.inverse());
    for (int i = 0; i < 50; ++i) {
        const VectorXd z = normal_matrix(3, 1, rng);
        EXPECT_LE((g->decode(z) - oracle.decode(z)).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(Reparametrize, PreservesImage) {
    std::mt19937_64 rng(13);
    auto coupling = CouplingDiffeo::random(2, 1, 8, 0.5, rng);
    for (const auto& [name, f] : all_variants(rng)) {
        for (const DiffeoPtr& A : {random_affine(2, rng), DiffeoPtr(coupling)}) {
            const auto g = reparametrize(f, A);
            for (int i = 0; i < 20; ++i) {
                const VectorXd z = uniform_in_box(f->domain(), rng);
                EXPECT_LE((g->decode(A->apply(z)) - f->decode(z)).cwiseAbs().maxCoeff(), 1e-10) << name;
            }
        }
    }
}

TEST(Reparametrize, DomainCoversImageOfBaseDomain) {
    std::mt19937_64 rng(14);
    auto sphere = std::make_shared<const SphereChartDecoder>(1.0);
    auto A = random_affine(2, rng);
    const auto g = reparametrize(sphere, A);
    for (int i = 0; i < 100; ++i) EXPECT_TRUE(g->domain().contains(A->apply(uniform_in_box(sphere->domain(), rng)), 1e-12));
}

TEST(Reparametrize, RejectsDimensionMismatch) {
    auto f = std::make_shared<const SphereChartDecoder>(1.0);
    EXPECT_THROW(reparametrize(f, AffineDiffeo::identity(3)), ArgumentError);
    EXPECT_THROW(reparametrize(nullptr, AffineDiffeo::identity(2)), ArgumentError);
    EXPECT_THROW(reparametrize(f, nullptr), ArgumentError);
}

TEST(Isometry, InnerProductsMatchUnderPushforward) {
    std::mt19937_64 rng(15);
    double worst = 0.0;
    for (int draw = 0; draw < 100; ++draw) {
        auto variants = all_variants(rng);
        const auto& f = variants[static_cast<std::size_t>(draw) % variants.size()].decoder;
        const DiffeoPtr A = draw % 2 ? random_affine(2, rng) : DiffeoPtr(CouplingDiffeo::random(2, 1, 8, 0.5, rng));
        const auto g = reparametrize(f, A);
        const VectorXd z = uniform_in_box(f->domain(), rng);
        const VectorXd u = normal_matrix(2, 1, rng), v = normal_matrix(2, 1, rng);
        const MatrixXd JA = A->jacobian(z);
        const double lhs = pullback_metric(*f, z).inner(u, v);
        const double rhs = pullback_metric(*g, A->apply(z)).inner(JA * u, JA * v);
        const double scale = tangent_norm(pullback_metric(*f, z), u) * tangent_norm(pullback_metric(*f, z), v);
        worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
    EXPECT_LE(worst, 1e-8);
}

TEST(Diffeo, AffineExamplesAndRoundTrip) {
    const AffineDiffeo twice(2 * MatrixXd::Identity(2, 2), VectorXd::Zero(2));
    EXPECT_EQ(diffeo_apply(twice, Vector2d(1, 1)), Vector2d(2, 2));
    EXPECT_THROW(AffineDiffeo(MatrixXd::Zero(2, 2), VectorXd::Zero(2)), ArgumentError);
    MatrixXd nearly_singular(2, 2);
    nearly_singular << 1, 1, 1, 1 + 1e-12;
    EXPECT_THROW(AffineDiffeo(nearly_singular, VectorXd::Zero(2)), ArgumentError);
    EXPECT_THROW(AffineDiffeo(MatrixXd::Identity(2, 2), VectorXd::Zero(3)), ArgumentError);
}

TEST(Diffeo, CouplingShiftsTailByHeadNetwork) {
    std::mt19937_64 rng(123);
    const auto A = CouplingDiffeo::random(2, 1, 8, 0.5, rng);
    // oracle: evaluate the shift network by hand
    const auto& net = A->shift_net();
    ASSERT_EQ(net.size(), 2u);
    const Vector2d z(0.4, -0.9);
    const VectorXd hidden = (net[0].weights * z.head(1) + net[0].bias).array().tanh().matrix();
    const double m = (net[1].weights * hidden + net[1].bias)(0);
    const VectorXd y = diffeo_apply(*A, z);
    EXPECT_EQ(y(0), z(0));
    EXPECT_NEAR(y(1), z(1) + m, 1e-15);
    const VectorXd back = diffeo_invert(*A, y);
    EXPECT_EQ(back(0), z(0));
    EXPECT_NEAR(back(1), z(1), 1e-15);
    EXPECT_NE(m, 0.0);
}

TEST(Diffeo, RoundTripAndJacobians) {
    std::mt19937_64 rng(16);
    std::vector<DiffeoPtr> maps{random_affine(3, rng), CouplingDiffeo::random(3, 1, 8, 0.5, rng),
                                CouplingDiffeo::random(3, 2, 8, 0.5, rng)};
    maps.push_back(std::make_shared<const CompositionDiffeo>(maps));
    const double h = 1e-6;
    for (const auto& A : maps) {
        for (int i = 0; i < 100; ++i) {
            const VectorXd z = normal_matrix(3, 1, rng);
            EXPECT_LE((A->invert(A->apply(z)) - z).cwiseAbs().maxCoeff(), 1e-10) << A->kind();
            EXPECT_LE((A->apply(A->invert(z)) - z).cwiseAbs().maxCoeff(), 1e-10) << A->kind();
            const MatrixXd J = A->jacobian(z);
            EXPECT_GT(std::abs(J.determinant()), 0.0);
            MatrixXd fd(3, 3);
            for (int j = 0; j < 3; ++j) {
                VectorXd zp = z, zm = z;
                zp(j) += h;
                zm(j) -= h;
                fd.col(j) = (A->apply(zp) - A->apply(zm)) / (2 * h);
            }
            EXPECT_LE(relative_error(fd, J), 1e-7) << A->kind();
            const VectorXd y = A->apply(z);
            EXPECT_LE((A->inverse_jacobian(y) * J - MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-10);
        }
    }
}

TEST(Diffeo, CompositionOrder) {
    // parts[0] first: scale then shift
    auto scale = std::make_shared<const AffineDiffeo>(2 * MatrixXd::Identity(1, 1), VectorXd::Zero(1));
    auto shift = std::make_shared<const AffineDiffeo>(MatrixXd::Identity(1, 1), VectorXd::Ones(1));
    const CompositionDiffeo A({scale, shift});
    EXPECT_EQ(A.apply(VectorXd::Constant(1, 3.0))(0), 7.0);
    EXPECT_EQ(A.invert(VectorXd::Constant(1, 7.0))(0), 3.0);
}

TEST(LoadDecoder, LinearDocument) {
    const auto f = load_decoder(R"({"latent_dim": 2, "ambient_dim": 3, "kind": "linear",
                                    "weights": [[1, 0], [0, 1], [0, 0]]})");
    EXPECT_EQ(f->decode(Vector2d(1, 2)), Eigen::Vector3d(1, 2, 0));
}

TEST(LoadDecoder, SingleTanhLayerJacobianAtOrigin) {
    const auto f = load_decoder(R"({"latent_dim": 2, "ambient_dim": 3, "kind": "mlp",
        "layers": [{"weights": [[0.5, 1], [2, -1], [0, 3]], "bias": [0, 0, 0], "activation": "tanh"}]})");
    MatrixXd W(3, 2);
    W << 0.5, 1, 2, -1, 0, 3;
    EXPECT_LE((f->jacobian(VectorXd::Zero(2)) - W).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(LoadDecoder, UnknownActivationNamesField) {
    try {
        load_decoder(R"({"latent_dim": 2, "ambient_dim": 2, "kind": "mlp",
            "layers": [{"weights": [[1, 0], [0, 1]], "bias": [0, 0], "activation": "relu6"}]})");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.path(), "$.layers[0].activation");
        EXPECT_NE(std::string(e.what()).find("relu6"), std::string::npos);
    }
}

TEST(LoadDecoder, SchemaViolationsNameTheirPath) {
    const auto path_of = [](const char* doc) -> std::string {
        try {
            load_decoder(doc);
        } catch (const ParseError& e) {
            return e.path();
        }
        return "<no error>";
    };
    EXPECT_EQ(path_of(R"({"latent_dim": 2, "ambient_dim": 3, "kind": "linear", "weights": [[1, 0], [0, 1]]})"),
              "$.weights");
    EXPECT_EQ(path_of(R"({"latent_dim": 2, "ambient_dim": 3, "kind": "linear"})"), "$.weights");
    EXPECT_EQ(path_of(R"({"latent_dim": 2, "ambient_dim": 3, "kind": "bogus"})"), "$.kind");
    EXPECT_EQ(path_of(R"({"latent_dim": 2, "ambient_dim": 3, "kind": "sphere", "extra": 1})"), "$.extra");
    EXPECT_EQ(path_of(R"({"latent_dim": 2, "ambient_dim": 3, "kind": "sphere", "radius": "big"})"), "$.radius");
    EXPECT_EQ(path_of(R"({"latent_dim": 2, "ambient_dim": 1, "kind": "sphere"})"), "$.ambient_dim");
    EXPECT_EQ(path_of(R"({"latent_dim": 2, "ambient_dim": 3, "kind": "mlp",
        "layers": [{"weights": [[1, 0], [0, 1]]}, {"weights": [[1, 0, 0]]}]})"), "$.layers[1].weights");
    EXPECT_EQ(path_of(R"({"latent_dim": 2, "ambient_dim": 3, "kind": "reparametrized",
        "base": {"latent_dim": 2, "ambient_dim": 3, "kind": "sphere"},
        "diffeo": {"kind": "affine", "matrix": [[1, 0], [0, 0]]}})"), "$.diffeo");
    EXPECT_EQ(path_of("{not json"), "$");
}

TEST(LoadDecoder, ReparametrizedDocumentMatchesProgrammaticBuild) {
    const auto f = load_decoder(R"({"latent_dim": 2, "ambient_dim": 3, "kind": "reparametrized",
        "base": {"latent_dim": 2, "ambient_dim": 3, "kind": "sphere", "radius": 2.0},
        "diffeo": {"kind": "composition", "parts": [
            {"kind": "affine", "matrix": [[1.2, 0.3], [-0.1, 0.9]], "offset": [0.1, 0.0]},
            {"kind": "coupling", "split": 1, "seed": 42}]}})");
    std::mt19937_64 rng(42);
    auto coupling = CouplingDiffeo::random(2, 1, 8, 0.5, rng);
    MatrixXd M(2, 2);
    M << 1.2, 0.3, -0.1, 0.9;
    auto A = std::make_shared<const CompositionDiffeo>(
        std::vector<DiffeoPtr>{std::make_shared<const AffineDiffeo>(M, Vector2d(0.1, 0.0)), coupling});
    const auto g = reparametrize(std::make_shared<const SphereChartDecoder>(2.0), A);
    const VectorXd z = A->apply(Vector2d(1.5, 0.2));
    EXPECT_EQ(f->decode(z), g->decode(z));
    EXPECT_EQ(f->kind(), "reparametrized");
}

TEST(LoadDecoder, ExampleDocumentsParse) {
    for (const char* doc : {
             R"({"latent_dim": 2, "ambient_dim": 3, "kind": "paraboloid", "coeffs": [1, -1],
                 "domain": {"lower": [-0.5, -0.5], "upper": [0.5, 0.5]}})",
             R"({"latent_dim": 2, "ambient_dim": 3, "kind": "sphere",
                 "domain": {"lower": [1.0, -1.0], "upper": [2.0, 1.0]}})",
         }) {
        const auto f = load_decoder(doc);
        EXPECT_EQ(f->latent_dim(), 2);
        EXPECT_TRUE(f->domain().contains(Vector2d(0.0 + (f->kind() == "sphere") * 1.5, 0.0)));
    }
}
