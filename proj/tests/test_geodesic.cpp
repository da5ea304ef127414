#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "idgeo/geodesic.hpp"
#include "support.hpp"

using namespace idgeo;
using namespace idgeo::testing;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;
using std::numbers::pi;

namespace {

SolverConfig desk_config() {
    SolverConfig cfg;
    cfg.early_stop_delta = 1e-5;
    return cfg;
}

double great_circle(const Vector2d& a, const Vector2d& b, double r = 1.0) {
    const SphereChartDecoder f(r);
    const VectorXd x = f.decode(a) / r, y = f.decode(b) / r;
    return r * std::acos(std::clamp(x.dot(y), -1.0, 1.0));
}

std::vector<double> segment_lengths(const Decoder& f, const Curve& curve, int n) {
    std::vector<double> out;
    const VectorXd t = time_grid(n);
    VectorXd prev = f.decode(curve_eval(curve, t(0)));
    for (int i = 1; i < n; ++i) {
        const VectorXd x = f.decode(curve_eval(curve, t(i)));
        out.push_back((x - prev).norm());
        prev = x;
    }
    return out;
}

// Returns NaN once the first coordinate passes `limit`.
class CliffDecoder final : public Decoder {
public:
    explicit CliffDecoder(double limit) : Decoder(1, 1, Box::symmetric(1, 1.0)), limit_(limit) {}
    std::string kind() const override { return "cliff"; }

protected:
    VectorXd decode_impl(const VectorXd& z) const override {
        return VectorXd::Constant(1, z(0) > limit_ ? std::nan("") : z(0));
    }
    MatrixXd jacobian_impl(const VectorXd&) const override { return MatrixXd::Identity(1, 1); }

private:
    double limit_;
};

} // namespace

TEST(SolverConfig, DefaultsAndValidation) {
    const SolverConfig cfg;
    EXPECT_EQ(cfg.n_segments, 10);
    EXPECT_EQ(cfg.n_t, 256);
    EXPECT_EQ(cfg.max_steps, 4096);
    EXPECT_EQ(cfg.learning_rate, 0.01);
    EXPECT_EQ(cfg.patience_steps, 100);
    EXPECT_EQ(cfg.early_stop_delta, 1.0);
    EXPECT_EQ(cfg.length_n_t, 256);
    EXPECT_NO_THROW(cfg.validate());
    SolverConfig bad = cfg;
    bad.n_t = 1;
    EXPECT_THROW(bad.validate(), ArgumentError);
    bad = cfg;
    bad.learning_rate = 0.0;
    EXPECT_THROW(bad.validate(), ArgumentError);
    bad = cfg;
    bad.max_steps = 0;
    EXPECT_THROW(bad.validate(), ArgumentError);
}

TEST(TimeGrid, Uniform) {
    const VectorXd t = time_grid(5);
    EXPECT_EQ(t, (VectorXd(5) << 0.0, 0.25, 0.5, 0.75, 1.0).finished());
    EXPECT_THROW(time_grid(1), ArgumentError);
}

TEST(DiscreteEnergy, UnitSpeedLine) {
    const LinearDecoder id(MatrixXd::Identity(1, 1));
    const auto basis = SplineBasis<double>::uniform(10);
    const Curve curve(VectorXd::Zero(1), VectorXd::Ones(1), basis);
    for (int n_t : {2, 3, 17, 256, 1000}) EXPECT_NEAR(discrete_energy(id, curve, n_t), 0.5, 1e-12) << n_t;
}

TEST(DiscreteEnergy, LinearStraightLineClosedForm) {
    std::mt19937_64 rng(1);
    const MatrixXd W = normal_matrix(4, 2, rng);
    const LinearDecoder f(W, normal_matrix(4, 1, rng));
    const auto basis = SplineBasis<double>::uniform(10);
    for (int trial = 0; trial < 10; ++trial) {
        const VectorXd a = normal_matrix(2, 1, rng), b = normal_matrix(2, 1, rng);
        // direct telescoping oracle: n_t - 1 equal segments each of length |W (b - a)| / (n_t - 1)
        const int n_t = 64;
        double oracle = 0.0;
        for (int i = 1; i < n_t; ++i) oracle += (W * (b - a) / (n_t - 1)).squaredNorm();
        oracle *= 0.5 * (n_t - 1);
        const double e = discrete_energy(f, Curve(a, b, basis), n_t);
        EXPECT_NEAR(e, oracle, 1e-12 * oracle);
        EXPECT_NEAR(e, 0.5 * (W * (b - a)).squaredNorm(), 1e-12 * oracle);
    }
}

TEST(DiscreteEnergy, ConstantCurveIsZero) {
    const SphereChartDecoder f(1.0);
    const Curve curve(Vector2d(1.2, 0.3), Vector2d(1.2, 0.3), SplineBasis<double>::uniform(10));
    EXPECT_EQ(discrete_energy(f, curve, 256), 0.0);
}

TEST(DiscreteEnergy, NonFiniteOutputNamesSample) {
    const CliffDecoder f(0.5);
    const Curve curve(VectorXd::Zero(1), VectorXd::Ones(1), SplineBasis<double>::uniform(2));
    try {
        discrete_energy(f, curve, 11);
        FAIL() << "expected NumericError";
    } catch (const NumericError& e) {
        EXPECT_EQ(e.index(), 6); // t = 0.6 is the first sample beyond the cliff
    }
}

TEST(DiscreteEnergy, RejectsBadArguments) {
    const SphereChartDecoder f(1.0);
    const Curve curve(VectorXd::Zero(1), VectorXd::Ones(1), SplineBasis<double>::uniform(2));
    EXPECT_THROW(discrete_energy(f, curve, 16), ArgumentError);
    const Curve ok(Vector2d(1, 0), Vector2d(1.5, 0.5), SplineBasis<double>::uniform(2));
    EXPECT_THROW(discrete_energy(f, ok, 1), ArgumentError);
}

TEST(EnergyGradient, MatchesFiniteDifferences) {
    std::mt19937_64 rng(2);
    std::vector<DecoderPtr> decoders{std::make_shared<const SphereChartDecoder>(1.0), random_mlp(2, 5, 8, rng),
                                     std::make_shared<const ParaboloidDecoder>(Vector2d(1.0, -0.5))};
    const auto basis = SplineBasis<double>::uniform(10);
    const double h = 1e-5;
    for (int trial = 0; trial < 12; ++trial) {
        const auto& f = decoders[static_cast<std::size_t>(trial) % decoders.size()];
        Curve curve(uniform_in_box(f->domain(), rng), uniform_in_box(f->domain(), rng), basis,
                    normal_matrix(2, basis->n_free(), rng, 0.2));
        const MatrixXd grad = energy_gradient(*f, curve, 128);
        MatrixXd fd(grad.rows(), grad.cols());
        for (Eigen::Index i = 0; i < grad.rows(); ++i) {
            for (Eigen::Index j = 0; j < grad.cols(); ++j) {
                Curve plus = curve, minus = curve;
                plus.omega(i, j) += h;
                minus.omega(i, j) -= h;
                fd(i, j) = (discrete_energy(*f, plus, 128) - discrete_energy(*f, minus, 128)) / (2 * h);
            }
        }
        EXPECT_LE(relative_error(grad, fd), 1e-5) << f->kind() << " trial " << trial;
    }
}

TEST(EnergyGradient, ConstantCurveHasZeroGradient) {
    const SphereChartDecoder f(1.0);
    const Curve curve(Vector2d(1.2, 0.3), Vector2d(1.2, 0.3), SplineBasis<double>::uniform(10));
    EXPECT_EQ(energy_gradient(f, curve, 256).cwiseAbs().maxCoeff(), 0.0);
}

TEST(EnergyGradient, StraightLineIsStationaryForLinearDecoder) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const LinearDecoder f(normal_matrix(3, 2, rng));
        const Curve curve(normal_matrix(2, 1, rng), normal_matrix(2, 1, rng), SplineBasis<double>::uniform(10));
        EXPECT_LE(energy_gradient(f, curve, 256).norm(), 1e-10);
    }
}

TEST(SolveGeodesic, LinearLengthIsClosedForm) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 5; ++trial) {
        const MatrixXd W = normal_matrix(3, 2, rng);
        const LinearDecoder f(W);
        const VectorXd z1 = normal_matrix(2, 1, rng), z2 = normal_matrix(2, 1, rng);
        const auto sol = solve_geodesic(f, z1, z2, SolverConfig{});
        const double exact = (W * (z2 - z1)).norm();
        EXPECT_NEAR(sol.length, exact, 1e-3 * exact);
        EXPECT_TRUE(sol.converged);
    }
}

TEST(SolveGeodesic, CoincidentEndpoints) {
    const SphereChartDecoder f(1.0);
    const auto sol = solve_geodesic(f, Vector2d(1.5, 0.1), Vector2d(1.5, 0.1), SolverConfig{});
    EXPECT_EQ(sol.length, 0.0);
    EXPECT_EQ(sol.energy, 0.0);
    EXPECT_EQ(sol.steps_taken, 0);
    EXPECT_TRUE(sol.converged);
    EXPECT_EQ(geodesic_distance(f, Vector2d(1.2, 0.0), Vector2d(1.2, 0.0), SolverConfig{}), 0.0);
}

TEST(SolveGeodesic, SphereQuarterCircle) {
    const SphereChartDecoder f(1.0, Box{Vector2d(0.8, -0.2), Vector2d(2.3, 1.8)});
    const auto sol = solve_geodesic(f, Vector2d(pi / 2, 0.0), Vector2d(pi / 2, pi / 2), desk_config());
    EXPECT_NEAR(sol.length, pi / 2, 0.01 * pi / 2);
    // the library-default early stop is looser but still inside the same tolerance here
    const auto loose = solve_geodesic(f, Vector2d(pi / 2, 0.0), Vector2d(pi / 2, pi / 2), SolverConfig{});
    EXPECT_NEAR(loose.length, pi / 2, 0.01 * pi / 2);
}

TEST(SolveGeodesic, SphereOffEquatorMatchesGreatCircle) {
    const SphereChartDecoder f(1.0);
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        const Vector2d a = uniform_in_box(f.domain(), rng), b = uniform_in_box(f.domain(), rng);
        const auto sol = solve_geodesic(f, a, b, desk_config());
        const double exact = great_circle(a, b);
        EXPECT_NEAR(sol.length, exact, 1e-3 * exact);
    }
}

TEST(SolveGeodesic, SolutionInvariants) {
    const SphereChartDecoder f(1.0);
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 4; ++trial) {
        const Vector2d a = uniform_in_box(f.domain(), rng), b = uniform_in_box(f.domain(), rng);
        const auto sol = solve_geodesic(f, a, b, desk_config());
        EXPECT_GE(sol.energy, 0.0);
        EXPECT_LE(sol.energy, sol.initial_energy);
        EXPECT_LE(sol.length * sol.length, 2.0 * sol.energy * (1 + 1e-6));
        ASSERT_EQ(sol.energy_trace.size(), static_cast<std::size_t>(sol.steps_taken) + 1);
        EXPECT_EQ(sol.energy_trace.front(), sol.initial_energy);
        EXPECT_EQ(sol.energy_trace.back(), sol.energy);
        for (std::size_t i = 1; i < sol.energy_trace.size(); ++i) EXPECT_LE(sol.energy_trace[i], sol.energy_trace[i - 1]);
        EXPECT_GT(sol.min_singular_value_seen, 0.0);
        EXPECT_FALSE(sol.left_domain);
        EXPECT_EQ(curve_eval(sol.curve, 0.0), VectorXd(a));
        EXPECT_EQ(curve_eval(sol.curve, 1.0), VectorXd(b));
    }
}

TEST(SolveGeodesic, ConstantSpeedOnOptimizedCurve) {
    std::mt19937_64 rng(7);
    const SphereChartDecoder sphere(1.0);
    const LinearDecoder flat(normal_matrix(3, 2, rng));
    for (const Decoder* f : {static_cast<const Decoder*>(&sphere), static_cast<const Decoder*>(&flat)}) {
        for (int trial = 0; trial < 3; ++trial) {
            const VectorXd a = uniform_in_box(f->domain(), rng), b = uniform_in_box(f->domain(), rng);
            const auto sol = solve_geodesic(*f, a, b, desk_config());
            const auto lengths = segment_lengths(*f, sol.curve, 256);
            const Eigen::Map<const VectorXd> v(lengths.data(), static_cast<Eigen::Index>(lengths.size()));
            const double mean = v.mean();
            const double sd = std::sqrt((v.array() - mean).square().sum() / static_cast<double>(v.size() - 1));
            EXPECT_LE(sd, 0.05 * mean) << f->kind();
        }
    }
}

TEST(SolveGeodesic, DiscretizationConsistency) {
    const SphereChartDecoder f(1.0);
    const Vector2d a(1.0, -0.9), b(2.1, 1.0);
    SolverConfig coarse = desk_config(), fine = desk_config();
    fine.n_t = fine.length_n_t = 512;
    const double l256 = solve_geodesic(f, a, b, coarse).length;
    const double l512 = solve_geodesic(f, a, b, fine).length;
    EXPECT_LE(std::abs(l512 - l256), 0.005 * l256);
}

TEST(GeodesicDistance, SymmetryAndTriangleInequality) {
    const SphereChartDecoder f(1.0);
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 3; ++trial) {
        const Vector2d x = uniform_in_box(f.domain(), rng), y = uniform_in_box(f.domain(), rng),
                       z = uniform_in_box(f.domain(), rng);
        const double dxz = geodesic_distance(f, x, z, desk_config());
        const double dzx = geodesic_distance(f, z, x, desk_config());
        EXPECT_LE(std::abs(dxz - dzx), 0.01 * dxz);
        EXPECT_LE(dxz, geodesic_distance(f, x, y, desk_config()) + geodesic_distance(f, y, z, desk_config()) +
                           0.01 * dxz);
    }
}

TEST(GeodesicDistance, InvariantUnderReparametrization) {
    std::mt19937_64 rng(9);
    auto sphere = std::make_shared<const SphereChartDecoder>(1.0);
    for (int trial = 0; trial < 4; ++trial) {
        const DiffeoPtr A = trial % 2 ? random_affine(2, rng) : DiffeoPtr(CouplingDiffeo::random(2, 1, 8, 0.5, rng));
        const auto g = reparametrize(sphere, A);
        const VectorXd z1 = uniform_in_box(sphere->domain(), rng), z2 = uniform_in_box(sphere->domain(), rng);
        const double d_f = geodesic_distance(*sphere, z1, z2, desk_config());
        const double d_g = geodesic_distance(*g, A->apply(z1), A->apply(z2), desk_config());
        EXPECT_LE(std::abs(d_f - d_g), 0.02 * d_f) << A->kind();
    }
}

TEST(SolveGeodesic, NumericErrorCarriesStep) {
    // the endpoint lies past the cliff, so the very first evaluation fails
    const CliffDecoder f(0.95);
    SolverConfig cfg;
    try {
        solve_geodesic(f, VectorXd::Constant(1, -0.5), VectorXd::Constant(1, 0.99), cfg);
        FAIL() << "expected NumericError";
    } catch (const NumericError& e) {
        EXPECT_EQ(e.index(), 0);
    }
}

TEST(SolveGeodesic, VerifyModeFailsOnRankDeficientJacobian) {
    // the sphere chart degenerates at the pole; declared domain reaches close to it
    const SphereChartDecoder f(1.0, Box{Vector2d(2e-3, -1.0), Vector2d(1.0, 1.0)});
    SolverConfig cfg = desk_config();
    cfg.verify = true;
    cfg.rank_tol = 0.5; // sin(theta) below 0.5 near theta = 0.1
    EXPECT_THROW(solve_geodesic(f, Vector2d(0.1, -0.5), Vector2d(0.1, 0.5), cfg), RankDeficiencyError);
    cfg.verify = false;
    const auto sol = solve_geodesic(f, Vector2d(0.1, -0.5), Vector2d(0.1, 0.5), cfg);
    EXPECT_LT(sol.min_singular_value_seen, 0.5);
}

TEST(SolveGeodesic, MultiStartNeverWorse) {
    const SphereChartDecoder f(1.0);
    SolverConfig cfg = desk_config();
    const Vector2d a(1.0, -1.0), b(2.0, 1.1);
    const auto single = solve_geodesic(f, a, b, cfg);
    cfg.multi_start = true;
    const auto multi = solve_geodesic(f, a, b, cfg);
    EXPECT_LE(multi.energy, single.energy);
}

TEST(EnsembleEnergy, SingleMemberMatchesDiscreteEnergy) {
    std::mt19937_64 rng(10);
    auto f = random_mlp(2, 3, 6, rng);
    const auto basis = SplineBasis<double>::uniform(10);
    std::mt19937_64 draw(0);
    for (int trial = 0; trial < 5; ++trial) {
        const Curve curve(normal_matrix(2, 1, rng), normal_matrix(2, 1, rng), basis,
                          normal_matrix(2, basis->n_free(), rng, 0.3));
        const double e = discrete_energy(*f, curve, 64);
        EXPECT_DOUBLE_EQ(ensemble_energy({f}, curve, 64, draw), e);
        EXPECT_DOUBLE_EQ(ensemble_energy({f, f, f}, curve, 64, draw), e);
    }
}

TEST(EnsembleEnergy, IdenticalMembersSolveLikeSingleDecoder) {
    auto f = std::make_shared<const SphereChartDecoder>(1.0);
    const Vector2d a(1.2, -0.5), b(1.9, 0.8);
    const auto single = solve_geodesic(*f, a, b, desk_config());
    const auto ensemble = solve_geodesic_ensemble({f, f, f}, a, b, desk_config(), 3);
    EXPECT_NEAR(ensemble.length, single.length, 1e-12);
    ASSERT_EQ(ensemble.member_lengths.size(), 3u);
    for (double l : ensemble.member_lengths) EXPECT_NEAR(l, single.length, 1e-12);
}

TEST(EnsembleEnergy, PerturbedPairMeanDominatesSingleDecoder) {
    std::mt19937_64 rng(11);
    const MatrixXd W = normal_matrix(3, 2, rng);
    const MatrixXd E = normal_matrix(3, 2, rng);
    const double eps = 0.05;
    auto plus = std::make_shared<const LinearDecoder>(W + eps * E);
    auto minus = std::make_shared<const LinearDecoder>(W - eps * E);
    const LinearDecoder single(W);
    const Curve curve(Vector2d(-0.5, 0.2), Vector2d(0.7, -0.4), SplineBasis<double>::uniform(10));
    std::mt19937_64 draw(12);
    const int draws = 1000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < draws; ++i) {
        const double e = ensemble_energy({plus, minus}, curve, 32, draw);
        sum += e;
        sum2 += e * e;
    }
    const double mean = sum / draws;
    const double se = std::sqrt((sum2 / draws - mean * mean) / (draws - 1));
    EXPECT_GE(mean + 3 * se, discrete_energy(single, curve, 32));
}

TEST(EnsembleEnergy, RejectsMixedLatentDims) {
    auto f2 = std::make_shared<const SphereChartDecoder>(1.0);
    auto f3 = std::make_shared<const LinearDecoder>(MatrixXd::Identity(3, 3));
    const Curve curve(Vector2d(1, 0), Vector2d(1.5, 0.5), SplineBasis<double>::uniform(3));
    std::mt19937_64 draw(0);
    EXPECT_THROW(ensemble_energy({f2, f3}, curve, 16, draw), ArgumentError);
    EXPECT_THROW(ensemble_energy({}, curve, 16, draw), ArgumentError);
    EXPECT_THROW(solve_geodesic_ensemble({f2, f3}, Vector2d(1, 0), Vector2d(1.5, 0.5), desk_config()), ArgumentError);
}

TEST(EnsembleSolve, DeterministicForFixedSeedAndStream) {
    std::mt19937_64 rng(13);
    const MatrixXd W = normal_matrix(3, 2, rng);
    std::vector<DecoderPtr> ensemble;
    for (int k = 0; k < 3; ++k) ensemble.push_back(std::make_shared<const LinearDecoder>(W + 0.05 * normal_matrix(3, 2, rng)));
    SolverConfig cfg = desk_config();
    cfg.max_steps = 300;
    const auto first = solve_geodesic_ensemble(ensemble, Vector2d(-0.5, 0.5), Vector2d(0.6, -0.3), cfg, 7);
    const auto second = solve_geodesic_ensemble(ensemble, Vector2d(-0.5, 0.5), Vector2d(0.6, -0.3), cfg, 7);
    EXPECT_EQ(first.length, second.length);
    EXPECT_EQ(first.curve.omega, second.curve.omega);
    cfg.ensemble_redraw = EnsembleRedraw::PerStep;
    EXPECT_NO_THROW(solve_geodesic_ensemble(ensemble, Vector2d(-0.5, 0.5), Vector2d(0.6, -0.3), cfg, 7));
    EXPECT_EQ(parse_ensemble_redraw(to_string(EnsembleRedraw::PerStep)), EnsembleRedraw::PerStep);
    EXPECT_THROW(parse_ensemble_redraw("sometimes"), ArgumentError);
}
