#pragma once

// Geodesics as minimizers of the discretized curve energy
//
//   E(gamma) = 1 / (2 dt) * sum_i || f(gamma(t_i)) - f(gamma(t_{i-1})) ||^2
//
// over the free spline parameters omega, optimized with Adam from the straight
// line omega = 0.

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "idgeo/decoder.hpp"
#include "idgeo/spline.hpp"

namespace idgeo {

using Curve = GeodesicCurve<double>;

/// How often decoder indices are redrawn in the ensemble energy.
enum class EnsembleRedraw {
    PerStepPerSegment, // new (j, k) for every segment at every optimizer step
    PerStep,           // one (j, k) per optimizer step, shared by all segments
};

std::string to_string(EnsembleRedraw redraw);
EnsembleRedraw parse_ensemble_redraw(const std::string& name);

struct SolverConfig {
    int n_segments = 10;
    int n_t = 256;
    int max_steps = 4096;
    double learning_rate = 0.01;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    /// Stop once the best energy improved by less than early_stop_delta
    /// (absolute) over the last patience_steps steps.
    int patience_steps = 100;
    double early_stop_delta = 1.0;
    /// Samples used for the reported length of the optimized curve.
    int length_n_t = 256;
    std::uint64_t seed = 0;

    /// Extra random initializations besides omega = 0; the lowest energy wins.
    bool multi_start = false;
    int n_restarts = 4;
    double restart_scale = 0.1;

    EnsembleRedraw ensemble_redraw = EnsembleRedraw::PerStepPerSegment;

    /// Verification mode: fail when the decoder Jacobian's smallest singular
    /// value drops below rank_tol at a curve sample, and warn on stderr when
    /// the curve leaves the decoder's declared domain.
    bool verify = false;
    double rank_tol = 1e-8;

    void validate() const;
    bool operator==(const SolverConfig&) const = default;
};

struct GeodesicSolution {
    explicit GeodesicSolution(Curve c) : curve(std::move(c)) {}

    Curve curve;
    double energy = 0.0;         // discrete energy of `curve` at n_t samples
    double initial_energy = 0.0; // straight-line energy
    double length = 0.0;         // at length_n_t samples
    int steps_taken = 0;
    bool converged = false;
    double min_singular_value_seen = 0.0;
    bool left_domain = false;
    /// Best-so-far energy after each optimizer step; entry 0 is the start.
    std::vector<double> energy_trace;
    /// Ensemble solves only: length of the optimized curve under each member.
    std::vector<double> member_lengths;
};

/// Uniform grid t_i = i / (n - 1), i = 0..n-1.
Eigen::VectorXd time_grid(int n);

double discrete_energy(const Decoder& f, const Curve& curve, int n_t);

/// Exact gradient of discrete_energy with respect to omega (d x k).
Eigen::MatrixXd energy_gradient(const Decoder& f, const Curve& curve, int n_t);

/// sum_i || f(gamma(t_i)) - f(gamma(t_{i-1})) || on n_t samples.
double curve_length(const Decoder& f, const Curve& curve, int n_t);

GeodesicSolution solve_geodesic(const Decoder& f, const Eigen::VectorXd& z1, const Eigen::VectorXd& z2,
                                const SolverConfig& cfg);

double geodesic_distance(const Decoder& f, const Eigen::VectorXd& z1, const Eigen::VectorXd& z2,
                         const SolverConfig& cfg);

/// One draw of the ensemble energy: segment i compares f_j(gamma(t_i)) with
/// f_k(gamma(t_{i-1})) for decoders f_j, f_k drawn uniformly and independently.
double ensemble_energy(const std::vector<DecoderPtr>& ensemble, const Curve& curve, int n_t,
                       std::mt19937_64& rng);

/// Minimizes the ensemble energy with indices redrawn per cfg.ensemble_redraw.
/// The RNG is derived from (cfg.seed, stream). The reported length uses one
/// fixed pairing drawn from the same seed.
GeodesicSolution solve_geodesic_ensemble(const std::vector<DecoderPtr>& ensemble, const Eigen::VectorXd& z1,
                                         const Eigen::VectorXd& z2, const SolverConfig& cfg,
                                         std::uint64_t stream = 0);

} // namespace idgeo
