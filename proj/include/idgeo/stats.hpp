#pragma once

// Manifold statistics under the pullback geometry and the stability
// statistics used to compare geodesic with Euclidean distances.

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

#include "idgeo/decoder.hpp"
#include "idgeo/geodesic.hpp"

namespace idgeo {

struct DistanceSample {
    int pair_id = 0;
    int model_id = 0;
    double d_euclidean = 0.0;
    double d_geodesic = 0.0;
    bool converged = false;
    int steps = 0;
    double energy = 0.0;
};

/// Psi(p) = sum_i d_g(p, x_i)^2. Solves run on `threads` workers; solve i uses
/// a seed derived from (cfg.seed, i).
double frechet_variance(const Decoder& f, const Eigen::VectorXd& p, const std::vector<Eigen::VectorXd>& points,
                        const SolverConfig& cfg, int threads = 1);

struct KarcherOptions {
    /// Initial step as a fraction of the bounding-box diagonal of the points.
    double initial_step_fraction = 0.1;
    double shrink = 0.5;
    /// Absolute latent step at which the search stops.
    double min_step = 1e-3;
    /// Budget on Psi evaluations; running out flags the result unconverged.
    int max_evaluations = 400;
    /// Start of the search; the arithmetic mean of the points when unset.
    std::optional<Eigen::VectorXd> initial_point;
    int threads = 1;
};

struct KarcherResult {
    Eigen::VectorXd mean;
    double psi = 0.0;
    int evaluations = 0;
    int iterations = 0;
    double final_step = 0.0;
    bool converged = false;
};

/// Compass search on Psi: try +-step along each axis, move to the best
/// improvement, otherwise shrink the step.
KarcherResult karcher_mean(const Decoder& f, const std::vector<Eigen::VectorXd>& points, const SolverConfig& cfg,
                           const KarcherOptions& options = {});

/// Sample standard deviation (n - 1 denominator) over the mean.
double coefficient_of_variation(const std::vector<double>& samples);

struct TTestResult {
    double t = 0.0;
    int df = 0;
    /// P(T <= t): small values support mean(cv_geodesic) < mean(cv_euclidean).
    double p_value = 0.0;
    /// P(T >= t), the opposite one-sided orientation.
    double p_value_upper = 0.0;
};

/// Two-sample Student t-test with pooled variance, df = n1 + n2 - 2.
TTestResult one_sided_t_test(const std::vector<double>& cv_geodesic, const std::vector<double>& cv_euclidean);

} // namespace idgeo
