#pragma once

// Configuration-driven experiments over decoders and their
// reparametrizations, with CSV / JSON reports.
//
// Config documents are JSON objects:
//
//   {"experiment": "cv", "seed": 7, "n_pairs": 50, "n_models": 10,
//    "decoder": {"latent_dim": 2, "ambient_dim": 3, "kind": "sphere"},
//    "solver": {"early_stop_delta": 1e-5},
//    "diffeo_family": {"kind": "mixed"},
//    "output": {"path": "cv.csv", "format": "csv"}}
//
// "decoder_file" may replace "decoder"; relative paths resolve against the
// config file's directory. Every field has a default, see ExperimentConfig.

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "idgeo/decoder.hpp"
#include "idgeo/geodesic.hpp"
#include "idgeo/stats.hpp"

namespace idgeo {

inline constexpr const char* kLibraryVersion = "0.1.0";
inline constexpr const char* kReportSchema = "idgeo-report/1";

enum class ExperimentKind { Oracle, Invariance, Cv, Geodesic, Karcher };
enum class OutputFormat { Csv, Json };
/// How the "retrained" models of a cv experiment are simulated.
enum class EnsembleSource {
    Diffeo,       // exact reparametrizations f o A_m^-1
    Perturbation, // independently perturbed decoder weights, then reparametrized
};

std::string to_string(ExperimentKind kind);
std::string to_string(OutputFormat format);
std::string to_string(EnsembleSource source);
ExperimentKind parse_experiment_kind(const std::string& name);
OutputFormat parse_output_format(const std::string& name);

struct DiffeoFamily {
    /// identity, affine, coupling, or mixed (alternating affine and coupling).
    std::string kind = "mixed";
    /// Affine draws M = I + affine_scale * N(0, 1), c = offset_scale * N(0, 1).
    double affine_scale = 0.4;
    double offset_scale = 0.1;
    int coupling_hidden = 8;
    double coupling_scale = 0.5;
    /// Redraws allowed per model when a draw is rejected as ill-conditioned.
    int max_retries = 16;

    bool operator==(const DiffeoFamily&) const = default;
};

struct KarcherSettings {
    /// Explicit points; when empty, n_points are sampled in the decoder domain.
    std::vector<Eigen::VectorXd> points;
    int n_points = 10;
    std::optional<Eigen::VectorXd> initial_point;
    double initial_step_fraction = 0.1;
    double shrink = 0.5;
    double min_step = 1e-3;
    int max_evaluations = 400;

    bool operator==(const KarcherSettings&) const;
};

/// Thresholds behind the pass/fail flags of each experiment.
struct CheckThresholds {
    double oracle_linear_rel_error = 1e-3;
    double oracle_sphere_rel_error = 1e-2;
    /// Per-pair (max - min) / mean across models.
    double max_geodesic_spread = 0.02;
    double min_euclidean_spread = 0.10;
    double min_euclidean_spread_fraction = 0.8;
    /// mean CV(geodesic) < max_cv_ratio * mean CV(euclidean).
    double max_cv_ratio = 0.1;
    /// t must be negative with |t| at least this large.
    double min_abs_t = 5.0;
    /// Flat decoders: Karcher mean within this distance (per coordinate) of the arithmetic mean.
    double karcher_flat_tolerance = 1e-2;
    double max_unconverged_fraction = 0.1;

    bool operator==(const CheckThresholds&) const = default;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Cv;
    nlohmann::json decoder;          // resolved decoder document
    std::string decoder_source = "inline"; // "inline" or the file it was read from; not compared
    SolverConfig solver;
    int n_pairs = 100;
    int n_models = 30;
    DiffeoFamily diffeo_family;
    EnsembleSource ensemble_source = EnsembleSource::Diffeo;
    /// Relative weight noise for the perturbation source.
    double perturbation_scale = 0.05;
    /// Adds the unmodified decoder as model 0. Defaults to true for invariance only.
    std::optional<bool> include_identity;
    /// Pairs closer than this fraction of the domain diagonal are redrawn.
    double min_pair_separation = 0.05;
    std::uint64_t seed = 0;
    int threads = 1;
    std::string output_path;
    OutputFormat output_format = OutputFormat::Csv;
    /// Endpoints for the geodesic experiment.
    std::optional<Eigen::VectorXd> z1;
    std::optional<Eigen::VectorXd> z2;
    KarcherSettings karcher;
    CheckThresholds checks;
    /// Keys skipped by a non-strict parse; not compared.
    std::vector<std::string> ignored_keys;

    bool uses_identity_model() const { return include_identity.value_or(kind == ExperimentKind::Invariance); }
    bool operator==(const ExperimentConfig& other) const;
};

/// Parses a config document. `base_dir` resolves a relative decoder_file.
/// Strict mode rejects unknown keys (all of them are listed in one error);
/// otherwise they are recorded in ignored_keys. Type errors are ParseError
/// with the field path.
ExperimentConfig parse_config(const std::string& text, bool strict = true, const std::string& base_dir = ".");
ExperimentConfig parse_config_json(const nlohmann::json& doc, bool strict = true, const std::string& base_dir = ".");
ExperimentConfig load_config_file(const std::string& path, bool strict = true);

/// Fully resolved config; parse_config(echo(c)) == c.
nlohmann::json echo_config(const ExperimentConfig& cfg);

struct Check {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string detail;
};

/// Sampled optimized curve of the geodesic experiment.
struct CurveTable {
    Eigen::VectorXd t;
    Eigen::MatrixXd latent;  // n x d
    Eigen::MatrixXd decoded; // n x D
    GeodesicSolution solution;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<DistanceSample> records; // sorted by (pair_id, model_id)
    std::vector<double> cv_geodesic;     // per pair
    std::vector<double> cv_euclidean;
    std::optional<TTestResult> t_test;
    nlohmann::json details = nlohmann::json::object(); // experiment-specific summary fields
    std::vector<Check> checks;
    double unconverged_fraction = 0.0;
    nlohmann::json provenance = nlohmann::json::object();
    std::optional<CurveTable> curve;

    bool passed() const;
    /// 0 iff every check passed (the unconverged-fraction check included).
    int exit_code() const { return passed() ? 0 : 1; }
};

ExperimentReport run_oracle_experiment(const ExperimentConfig& cfg);
ExperimentReport run_invariance_experiment(const ExperimentConfig& cfg);
ExperimentReport run_cv_experiment(const ExperimentConfig& cfg);
ExperimentReport run_geodesic(const ExperimentConfig& cfg);
ExperimentReport run_karcher_experiment(const ExperimentConfig& cfg);
/// Dispatches on cfg.kind.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Latent point pairs drawn uniformly in `box`, redrawing pairs closer than
/// min_separation * diagonal.
std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> sample_pairs(const Box& box, int n_pairs,
                                                                        double min_separation, std::uint64_t seed);

/// Model m of a diffeo family; deterministic in (seed, m).
DiffeoPtr draw_diffeo(const DiffeoFamily& family, int dim, std::uint64_t seed, int model, int* retries = nullptr);

/// CSV columns of distance records, in order.
inline constexpr const char* kCsvHeader = "pair_id,model_id,d_euclidean,d_geodesic,converged,steps,energy";

void write_csv(const ExperimentReport& report, std::ostream& out);
nlohmann::json report_to_json(const ExperimentReport& report);
/// Writes to `path` ("-" or empty is stdout) in `format`.
void write_report(const ExperimentReport& report, const std::string& path, OutputFormat format);

/// Reads the record table of a CSV report; '#' lines are skipped.
std::vector<DistanceSample> read_csv_records(std::istream& in);

/// Shortest round-trip decimal form.
std::string format_double(double value);

} // namespace idgeo
