#include "idgeo/stats.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <numeric>

#include "idgeo/errors.hpp"
#include "idgeo/parallel.hpp"
#include "idgeo/random.hpp"

namespace idgeo {

namespace {

void check_points(const Decoder& f, const std::vector<Eigen::VectorXd>& points, const char* op) {
    if (points.empty()) throw ArgumentError(std::string(op) + ": points must be nonempty");
    for (const auto& z : points) {
        if (z.size() != f.latent_dim()) {
            throw ArgumentError(std::string(op) + ": point dimension does not match decoder latent_dim");
        }
    }
}

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

double sum_sq_dev(const std::vector<double>& v, double mean) {
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return s;
}

} // namespace

double frechet_variance(const Decoder& f, const Eigen::VectorXd& p, const std::vector<Eigen::VectorXd>& points,
                        const SolverConfig& cfg, int threads) {
    check_points(f, points, "frechet_variance");
    std::vector<double> sq(points.size());
    parallel_for(points.size(), threads, [&](std::size_t i) {
        SolverConfig local = cfg;
        local.seed = mix_seed(cfg.seed, i);
        const double d = geodesic_distance(f, p, points[i], local);
        sq[i] = d * d;
    });
    // sorted summation keeps the result independent of point order
    std::sort(sq.begin(), sq.end());
    return std::accumulate(sq.begin(), sq.end(), 0.0);
}

KarcherResult karcher_mean(const Decoder& f, const std::vector<Eigen::VectorXd>& points, const SolverConfig& cfg,
                           const KarcherOptions& options) {
    check_points(f, points, "karcher_mean");
    if (!(options.shrink > 0.0 && options.shrink < 1.0)) throw ArgumentError("karcher_mean: shrink must lie in (0, 1)");
    if (!(options.min_step > 0.0)) throw ArgumentError("karcher_mean: min_step must be positive");
    if (!(options.initial_step_fraction > 0.0)) throw ArgumentError("karcher_mean: initial_step_fraction must be positive");

    const Eigen::Index d = f.latent_dim();
    Eigen::VectorXd lo = points.front(), hi = points.front();
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
    for (const auto& z : points) {
        lo = lo.cwiseMin(z);
        hi = hi.cwiseMax(z);
        sum += z;
    }

    KarcherResult result;
    result.mean = options.initial_point ? *options.initial_point : Eigen::VectorXd(sum / static_cast<double>(points.size()));
    if (result.mean.size() != d) throw ArgumentError("karcher_mean: initial point dimension mismatch");

    auto psi = [&](const Eigen::VectorXd& p) {
        ++result.evaluations;
        return frechet_variance(f, p, points, cfg, options.threads);
    };
    result.psi = psi(result.mean);

    double step = options.initial_step_fraction * (hi - lo).norm();
    if (step < options.min_step) {
        result.final_step = step;
        result.converged = true;
        return result;
    }
    while (step >= options.min_step) {
        if (result.evaluations + 2 * d > options.max_evaluations) break;
        ++result.iterations;
        Eigen::VectorXd best_point = result.mean;
        double best_psi = result.psi;
        for (Eigen::Index axis = 0; axis < d; ++axis) {
            for (double sign : {1.0, -1.0}) {
                Eigen::VectorXd candidate = result.mean;
                candidate(axis) += sign * step;
                const double value = psi(candidate);
                if (value < best_psi) {
                    best_psi = value;
                    best_point = candidate;
                }
            }
        }
        if (best_psi < result.psi) {
            result.mean = best_point;
            result.psi = best_psi;
        } else {
            step *= options.shrink;
        }
    }
    result.final_step = step;
    result.converged = step < options.min_step;
    return result;
}

double coefficient_of_variation(const std::vector<double>& samples) {
    if (samples.size() < 2) throw ArgumentError("coefficient_of_variation: need at least two samples");
    const double mean = mean_of(samples);
    if (mean == 0.0) throw ArgumentError("coefficient_of_variation: mean is zero");
    const double sd = std::sqrt(sum_sq_dev(samples, mean) / static_cast<double>(samples.size() - 1));
    return sd / mean;
}

TTestResult one_sided_t_test(const std::vector<double>& cv_geodesic, const std::vector<double>& cv_euclidean) {
    if (cv_geodesic.size() < 2 || cv_euclidean.size() < 2) {
        throw ArgumentError("one_sided_t_test: each sample needs at least two entries");
    }
    const double n1 = static_cast<double>(cv_geodesic.size());
    const double n2 = static_cast<double>(cv_euclidean.size());
    const double m1 = mean_of(cv_geodesic), m2 = mean_of(cv_euclidean);
    const double ss = sum_sq_dev(cv_geodesic, m1) + sum_sq_dev(cv_euclidean, m2);
    if (ss == 0.0) throw ArgumentError("one_sided_t_test: both samples have zero variance");

    TTestResult r;
    r.df = static_cast<int>(n1 + n2) - 2;
    const double pooled = ss / r.df;
    r.t = (m1 - m2) / std::sqrt(pooled * (1.0 / n1 + 1.0 / n2));
    const boost::math::students_t dist(r.df);
    r.p_value = boost::math::cdf(dist, r.t);
    r.p_value_upper = boost::math::cdf(boost::math::complement(dist, r.t));
    return r;
}

} // namespace idgeo
