#include "idgeo/geodesic.hpp"

#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>

#include "idgeo/errors.hpp"
#include "idgeo/metric.hpp"
#include "idgeo/random.hpp"

namespace idgeo {

std::string to_string(EnsembleRedraw redraw) {
    switch (redraw) {
    case EnsembleRedraw::PerStepPerSegment: return "per_step_per_segment";
    case EnsembleRedraw::PerStep: return "per_step";
    }
    return "per_step_per_segment";
}

EnsembleRedraw parse_ensemble_redraw(const std::string& name) {
    if (name == "per_step_per_segment") return EnsembleRedraw::PerStepPerSegment;
    if (name == "per_step") return EnsembleRedraw::PerStep;
    throw ArgumentError("unknown ensemble redraw mode \"" + name + "\"");
}

void SolverConfig::validate() const {
    auto positive = [](long v, const char* name) {
        if (v < 1) throw ArgumentError(std::string("SolverConfig.") + name + " must be positive");
    };
    positive(n_segments, "n_segments");
    positive(max_steps, "max_steps");
    positive(patience_steps, "patience_steps");
    positive(n_restarts, "n_restarts");
    if (n_t < 2) throw ArgumentError("SolverConfig.n_t must be at least 2");
    if (length_n_t < 2) throw ArgumentError("SolverConfig.length_n_t must be at least 2");
    if (!(learning_rate > 0.0)) throw ArgumentError("SolverConfig.learning_rate must be positive");
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0)) throw ArgumentError("SolverConfig.adam_beta1 must lie in [0, 1)");
    if (!(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) throw ArgumentError("SolverConfig.adam_beta2 must lie in [0, 1)");
    if (!(adam_eps > 0.0)) throw ArgumentError("SolverConfig.adam_eps must be positive");
    if (!(early_stop_delta >= 0.0)) throw ArgumentError("SolverConfig.early_stop_delta must be nonnegative");
    if (!(restart_scale >= 0.0)) throw ArgumentError("SolverConfig.restart_scale must be nonnegative");
    if (!(rank_tol > 0.0)) throw ArgumentError("SolverConfig.rank_tol must be positive");
}

Eigen::VectorXd time_grid(int n) {
    if (n < 2) throw ArgumentError("time grid needs at least two samples");
    Eigen::VectorXd t(n);
    for (int i = 0; i < n; ++i) t(i) = static_cast<double>(i) / static_cast<double>(n - 1);
    t(n - 1) = 1.0;
    return t;
}

namespace {

// Basis evaluation rows on a fixed time grid; P.row(i) maps omega_d to S_d(t_i).
struct CurveGrid {
    Eigen::VectorXd t;
    Eigen::MatrixXd P; // n x k

    CurveGrid(const SplineBasis<double>& basis, int n) : t(time_grid(n)), P(n, basis.n_free()) {
        for (int i = 0; i < n; ++i) P.row(i) = basis.evaluation_row(t(i));
    }

    int size() const { return static_cast<int>(t.size()); }
    double dt() const { return 1.0 / static_cast<double>(size() - 1); }

    // n x d matrix of curve points for the given omega.
    Eigen::MatrixXd points(const Curve& curve, const Eigen::MatrixXd& omega) const {
        Eigen::MatrixXd Z = P * omega.transpose();
        for (int i = 0; i < size(); ++i) {
            Z.row(i) += chord_point(curve.a, curve.b, t(i)).transpose();
        }
        return Z;
    }
};

[[noreturn]] void rethrow_at_sample(const NumericError& e, const CurveGrid& grid, int i) {
    std::ostringstream msg;
    msg << e.what() << " at curve sample " << i << " (t = " << grid.t(i) << ")";
    throw NumericError(msg.str(), i);
}

void check_curve(const Decoder& f, const Curve& curve) {
    if (curve.dim() != f.latent_dim()) {
        throw ArgumentError("curve dimension " + std::to_string(curve.dim()) + " does not match decoder latent_dim " +
                            std::to_string(f.latent_dim()));
    }
}

// Single-decoder energy at omega; fills the omega-gradient when requested.
double energy_on_grid(const Decoder& f, const Curve& curve, const Eigen::MatrixXd& omega, const CurveGrid& grid,
                      Eigen::MatrixXd* grad) {
    const int n = grid.size();
    const Eigen::MatrixXd Z = grid.points(curve, omega);
    Eigen::MatrixXd X(f.ambient_dim(), n);
    std::vector<Eigen::MatrixXd> J(grad ? static_cast<std::size_t>(n) : 0);
    Eigen::VectorXd x;
    Eigen::MatrixXd jac;
    for (int i = 0; i < n; ++i) {
        try {
            if (grad) {
                f.evaluate(Z.row(i).transpose(), x, J[static_cast<std::size_t>(i)]);
            } else {
                x = f.decode(Z.row(i).transpose());
            }
        } catch (const NumericError& e) {
            rethrow_at_sample(e, grid, i);
        }
        X.col(i) = x;
    }
    const double inv_dt = 1.0 / grid.dt();
    const Eigen::MatrixXd R = X.rightCols(n - 1) - X.leftCols(n - 1); // column i-1 holds x_i - x_{i-1}
    double energy = 0.0;
    for (int i = 0; i < n - 1; ++i) energy += R.col(i).squaredNorm();
    energy *= 0.5 * inv_dt;

    if (grad) {
        Eigen::MatrixXd G(n, curve.dim());
        for (int i = 0; i < n; ++i) {
            Eigen::VectorXd dx = Eigen::VectorXd::Zero(f.ambient_dim());
            if (i > 0) dx += R.col(i - 1);
            if (i < n - 1) dx -= R.col(i);
            G.row(i) = (J[static_cast<std::size_t>(i)].transpose() * (inv_dt * dx)).transpose();
        }
        *grad = G.transpose() * grid.P;
    }
    return energy;
}

using Pairing = std::vector<std::pair<std::size_t, std::size_t>>; // (j, k) per segment

Pairing draw_pairing(std::size_t members, int segments, bool shared, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, members - 1);
    Pairing pairing(static_cast<std::size_t>(segments));
    for (auto& p : pairing) {
        if (shared && &p != &pairing.front()) {
            p = pairing.front();
            continue;
        }
        p.first = pick(rng);
        p.second = pick(rng);
    }
    return pairing;
}

// Ensemble energy: segment i compares member j at t_i with member k at t_{i-1}.
double ensemble_energy_on_grid(const std::vector<DecoderPtr>& ensemble, const Curve& curve,
                               const Eigen::MatrixXd& omega, const CurveGrid& grid, const Pairing& pairing,
                               Eigen::MatrixXd* grad, double* length) {
    const int n = grid.size();
    const Eigen::MatrixXd Z = grid.points(curve, omega);
    const double inv_dt = 1.0 / grid.dt();
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, curve.dim());
    Eigen::VectorXd xa, xb;
    Eigen::MatrixXd ja, jb;
    double energy = 0.0;
    double total_length = 0.0;
    for (int i = 1; i < n; ++i) {
        const auto [j, k] = pairing[static_cast<std::size_t>(i - 1)];
        try {
            if (grad) {
                ensemble[j]->evaluate(Z.row(i).transpose(), xa, ja);
                ensemble[k]->evaluate(Z.row(i - 1).transpose(), xb, jb);
            } else {
                xa = ensemble[j]->decode(Z.row(i).transpose());
                xb = ensemble[k]->decode(Z.row(i - 1).transpose());
            }
        } catch (const NumericError& e) {
            rethrow_at_sample(e, grid, i);
        }
        const Eigen::VectorXd r = xa - xb;
        energy += r.squaredNorm();
        total_length += r.norm();
        if (grad) {
            G.row(i) += (ja.transpose() * (inv_dt * r)).transpose();
            G.row(i - 1) -= (jb.transpose() * (inv_dt * r)).transpose();
        }
    }
    if (grad) *grad = G.transpose() * grid.P;
    if (length) *length = total_length;
    return 0.5 * inv_dt * energy;
}

struct AdamResult {
    Eigen::MatrixXd omega;
    double energy = 0.0;
    int steps = 0;
    bool converged = false;
    std::vector<double> trace;
};

using Objective = std::function<double(const Eigen::MatrixXd& omega, Eigen::MatrixXd& grad)>;

AdamResult run_adam(const Objective& objective, Eigen::MatrixXd omega, const SolverConfig& cfg) {
    AdamResult result;
    Eigen::MatrixXd grad;
    auto evaluate = [&](int step) {
        double e;
        try {
            e = objective(omega, grad);
        } catch (const NumericError& err) {
            throw NumericError(std::string(err.what()) + " (optimizer step " + std::to_string(step) + ")", step);
        }
        if (!std::isfinite(e) || !grad.allFinite()) {
            throw NumericError("solve_geodesic: non-finite energy at step " + std::to_string(step), step);
        }
        return e;
    };

    double energy = evaluate(0);
    result.omega = omega;
    result.energy = energy;
    result.trace.reserve(static_cast<std::size_t>(cfg.max_steps) + 1);
    result.trace.push_back(energy);

    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(omega.rows(), omega.cols());
    Eigen::MatrixXd v = m;
    double beta1_power = 1.0, beta2_power = 1.0;
    for (int step = 1; step <= cfg.max_steps; ++step) {
        m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * grad;
        v = cfg.adam_beta2 * v + (1.0 - cfg.adam_beta2) * grad.cwiseAbs2();
        beta1_power *= cfg.adam_beta1;
        beta2_power *= cfg.adam_beta2;
        const Eigen::MatrixXd m_hat = m / (1.0 - beta1_power);
        const Eigen::MatrixXd v_hat = v / (1.0 - beta2_power);
        omega.array() -= cfg.learning_rate * m_hat.array() / (v_hat.array().sqrt() + cfg.adam_eps);

        energy = evaluate(step);
        if (energy < result.energy) {
            result.energy = energy;
            result.omega = omega;
        }
        result.trace.push_back(result.energy);
        result.steps = step;
        const auto s = static_cast<std::size_t>(step);
        const auto patience = static_cast<std::size_t>(cfg.patience_steps);
        if (s >= patience && result.trace[s - patience] - result.trace[s] < cfg.early_stop_delta) {
            result.converged = true;
            break;
        }
    }
    return result;
}

AdamResult optimize(const Objective& objective, Eigen::Index rows, Eigen::Index cols, const SolverConfig& cfg,
                    std::uint64_t stream) {
    AdamResult best = run_adam(objective, Eigen::MatrixXd::Zero(rows, cols), cfg);
    if (cfg.multi_start) {
        auto rng = derived_rng(cfg.seed, stream, rng_purpose::kMultiStart);
        std::normal_distribution<double> normal(0.0, cfg.restart_scale);
        for (int r = 0; r < cfg.n_restarts; ++r) {
            Eigen::MatrixXd start(rows, cols);
            for (Eigen::Index j = 0; j < cols; ++j)
                for (Eigen::Index i = 0; i < rows; ++i) start(i, j) = normal(rng);
            AdamResult candidate = run_adam(objective, std::move(start), cfg);
            if (candidate.energy < best.energy) {
                candidate.trace.front() = std::min(candidate.trace.front(), best.trace.front());
                best = std::move(candidate);
            }
        }
    }
    return best;
}

// Samples the final curve: smallest Jacobian singular value and domain exits.
void diagnose(const Decoder& f, const Curve& curve, const SolverConfig& cfg, GeodesicSolution& sol) {
    const CurveGrid grid(*curve.basis, cfg.length_n_t);
    const Eigen::MatrixXd Z = grid.points(curve, curve.omega);
    double smin = INFINITY;
    bool left = false;
    for (int i = 0; i < grid.size(); ++i) {
        const Eigen::VectorXd z = Z.row(i).transpose();
        smin = std::min(smin, min_singular_value(f.jacobian(z)));
        left = left || !f.domain().contains(z, 1e-9);
    }
    sol.min_singular_value_seen = smin;
    sol.left_domain = left;
    if (cfg.verify) {
        if (!(smin > cfg.rank_tol)) {
            throw RankDeficiencyError("solve_geodesic: decoder Jacobian smallest singular value " + std::to_string(smin) +
                                      " below rank_tol along the curve");
        }
        if (left) {
            std::cerr << "warning: geodesic leaves the decoder's declared latent domain\n";
        }
    }
}

void check_endpoints(const Decoder& f, const Eigen::VectorXd& z1, const Eigen::VectorXd& z2) {
    if (z1.size() != f.latent_dim() || z2.size() != f.latent_dim()) {
        throw ArgumentError("solve_geodesic: endpoints must have decoder latent_dim " + std::to_string(f.latent_dim()));
    }
    if (!z1.allFinite() || !z2.allFinite()) {
        throw ArgumentError("solve_geodesic: endpoints must be finite");
    }
}

} // namespace

double discrete_energy(const Decoder& f, const Curve& curve, int n_t) {
    check_curve(f, curve);
    const CurveGrid grid(*curve.basis, n_t);
    return energy_on_grid(f, curve, curve.omega, grid, nullptr);
}

Eigen::MatrixXd energy_gradient(const Decoder& f, const Curve& curve, int n_t) {
    check_curve(f, curve);
    const CurveGrid grid(*curve.basis, n_t);
    Eigen::MatrixXd grad;
    energy_on_grid(f, curve, curve.omega, grid, &grad);
    return grad;
}

double curve_length(const Decoder& f, const Curve& curve, int n_t) {
    check_curve(f, curve);
    const CurveGrid grid(*curve.basis, n_t);
    const Eigen::MatrixXd Z = grid.points(curve, curve.omega);
    double length = 0.0;
    Eigen::VectorXd prev;
    for (int i = 0; i < grid.size(); ++i) {
        Eigen::VectorXd x;
        try {
            x = f.decode(Z.row(i).transpose());
        } catch (const NumericError& e) {
            rethrow_at_sample(e, grid, i);
        }
        if (i > 0) length += (x - prev).norm();
        prev = std::move(x);
    }
    return length;
}

GeodesicSolution solve_geodesic(const Decoder& f, const Eigen::VectorXd& z1, const Eigen::VectorXd& z2,
                                const SolverConfig& cfg) {
    cfg.validate();
    check_endpoints(f, z1, z2);
    GeodesicSolution sol(Curve(z1, z2, SplineBasis<double>::uniform(cfg.n_segments)));

    if (z1 == z2) {
        sol.converged = true;
        sol.energy_trace = {0.0};
        diagnose(f, sol.curve, cfg, sol);
        return sol;
    }

    const CurveGrid grid(*sol.curve.basis, cfg.n_t);
    const Objective objective = [&](const Eigen::MatrixXd& omega, Eigen::MatrixXd& grad) {
        return energy_on_grid(f, sol.curve, omega, grid, &grad);
    };
    AdamResult best = optimize(objective, sol.curve.omega.rows(), sol.curve.omega.cols(), cfg, 0);

    sol.curve.omega = std::move(best.omega);
    sol.energy = best.energy;
    sol.initial_energy = best.trace.front();
    sol.steps_taken = best.steps;
    sol.converged = best.converged;
    sol.energy_trace = std::move(best.trace);
    sol.length = curve_length(f, sol.curve, cfg.length_n_t);
    diagnose(f, sol.curve, cfg, sol);
    return sol;
}

double geodesic_distance(const Decoder& f, const Eigen::VectorXd& z1, const Eigen::VectorXd& z2,
                         const SolverConfig& cfg) {
    return solve_geodesic(f, z1, z2, cfg).length;
}

namespace {

void check_ensemble(const std::vector<DecoderPtr>& ensemble) {
    if (ensemble.empty()) throw ArgumentError("ensemble must not be empty");
    for (const auto& member : ensemble) {
        if (!member) throw ArgumentError("ensemble contains a null decoder");
        if (member->latent_dim() != ensemble.front()->latent_dim() ||
            member->ambient_dim() != ensemble.front()->ambient_dim()) {
            throw ArgumentError("ensemble members have mixed latent or ambient dimensions");
        }
    }
}

} // namespace

double ensemble_energy(const std::vector<DecoderPtr>& ensemble, const Curve& curve, int n_t, std::mt19937_64& rng) {
    check_ensemble(ensemble);
    check_curve(*ensemble.front(), curve);
    const CurveGrid grid(*curve.basis, n_t);
    const Pairing pairing = draw_pairing(ensemble.size(), grid.size() - 1, false, rng);
    return ensemble_energy_on_grid(ensemble, curve, curve.omega, grid, pairing, nullptr, nullptr);
}

GeodesicSolution solve_geodesic_ensemble(const std::vector<DecoderPtr>& ensemble, const Eigen::VectorXd& z1,
                                         const Eigen::VectorXd& z2, const SolverConfig& cfg, std::uint64_t stream) {
    cfg.validate();
    check_ensemble(ensemble);
    const Decoder& first = *ensemble.front();
    check_endpoints(first, z1, z2);
    GeodesicSolution sol(Curve(z1, z2, SplineBasis<double>::uniform(cfg.n_segments)));

    if (z1 == z2) {
        sol.converged = true;
        sol.energy_trace = {0.0};
        sol.member_lengths.assign(ensemble.size(), 0.0);
        diagnose(first, sol.curve, cfg, sol);
        return sol;
    }

    const CurveGrid grid(*sol.curve.basis, cfg.n_t);
    auto rng = derived_rng(cfg.seed, stream, rng_purpose::kEnsembleRedraw);
    const bool shared = cfg.ensemble_redraw == EnsembleRedraw::PerStep;
    const Objective objective = [&](const Eigen::MatrixXd& omega, Eigen::MatrixXd& grad) {
        const Pairing pairing = draw_pairing(ensemble.size(), grid.size() - 1, shared, rng);
        return ensemble_energy_on_grid(ensemble, sol.curve, omega, grid, pairing, &grad, nullptr);
    };
    AdamResult best = optimize(objective, sol.curve.omega.rows(), sol.curve.omega.cols(), cfg, stream);

    sol.curve.omega = std::move(best.omega);
    sol.initial_energy = best.trace.front();
    sol.steps_taken = best.steps;
    sol.converged = best.converged;
    sol.energy_trace = std::move(best.trace);

    auto report_rng = derived_rng(cfg.seed, stream, rng_purpose::kEnsembleReport);
    const CurveGrid length_grid(*sol.curve.basis, cfg.length_n_t);
    const Pairing length_pairing = draw_pairing(ensemble.size(), length_grid.size() - 1, false, report_rng);
    ensemble_energy_on_grid(ensemble, sol.curve, sol.curve.omega, length_grid, length_pairing, nullptr, &sol.length);
    const Pairing energy_pairing = draw_pairing(ensemble.size(), grid.size() - 1, false, report_rng);
    sol.energy = ensemble_energy_on_grid(ensemble, sol.curve, sol.curve.omega, grid, energy_pairing, nullptr, nullptr);

    for (const auto& member : ensemble) {
        sol.member_lengths.push_back(curve_length(*member, sol.curve, cfg.length_n_t));
    }
    diagnose(first, sol.curve, cfg, sol);
    return sol;
}

} // namespace idgeo
