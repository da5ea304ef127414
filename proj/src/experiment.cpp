#include "idgeo/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "idgeo/decoder_io.hpp"
#include "idgeo/errors.hpp"
#include "idgeo/parallel.hpp"
#include "idgeo/random.hpp"

namespace idgeo {

using nlohmann::json;

// ---------------------------------------------------------------- names

std::string to_string(ExperimentKind kind) {
    switch (kind) {
    case ExperimentKind::Oracle: return "oracle";
    case ExperimentKind::Invariance: return "invariance";
    case ExperimentKind::Cv: return "cv";
    case ExperimentKind::Geodesic: return "geodesic";
    case ExperimentKind::Karcher: return "karcher";
    }
    return "cv";
}

std::string to_string(OutputFormat format) { return format == OutputFormat::Json ? "json" : "csv"; }

std::string to_string(EnsembleSource source) {
    return source == EnsembleSource::Perturbation ? "perturbation" : "diffeo";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
    for (auto k : {ExperimentKind::Oracle, ExperimentKind::Invariance, ExperimentKind::Cv, ExperimentKind::Geodesic,
                   ExperimentKind::Karcher}) {
        if (to_string(k) == name) return k;
    }
    throw ArgumentError("unknown experiment \"" + name + "\" (expected oracle, invariance, cv, geodesic or karcher)");
}

OutputFormat parse_output_format(const std::string& name) {
    if (name == "csv") return OutputFormat::Csv;
    if (name == "json") return OutputFormat::Json;
    throw ArgumentError("unknown output format \"" + name + "\" (expected csv or json)");
}

namespace {

bool same_vector(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return a.size() == b.size() && (a.array() == b.array()).all();
}

bool same_optional(const std::optional<Eigen::VectorXd>& a, const std::optional<Eigen::VectorXd>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || same_vector(*a, *b);
}

} // namespace

bool KarcherSettings::operator==(const KarcherSettings& o) const {
    if (points.size() != o.points.size()) return false;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!same_vector(points[i], o.points[i])) return false;
    }
    return n_points == o.n_points && same_optional(initial_point, o.initial_point) &&
           initial_step_fraction == o.initial_step_fraction && shrink == o.shrink && min_step == o.min_step &&
           max_evaluations == o.max_evaluations;
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
    return kind == o.kind && decoder == o.decoder && solver == o.solver && n_pairs == o.n_pairs &&
           n_models == o.n_models && diffeo_family == o.diffeo_family && ensemble_source == o.ensemble_source &&
           perturbation_scale == o.perturbation_scale && include_identity == o.include_identity &&
           min_pair_separation == o.min_pair_separation && seed == o.seed && threads == o.threads &&
           output_path == o.output_path && output_format == o.output_format && same_optional(z1, o.z1) &&
           same_optional(z2, o.z2) && karcher == o.karcher && checks == o.checks;
}

// ---------------------------------------------------------------- parsing

namespace {

// Walks one JSON object, tracking which keys were consumed.
class FieldReader {
public:
    FieldReader(const json& doc, std::string path, std::vector<std::string>& unknown)
        : doc_(doc), path_(std::move(path)), unknown_(unknown) {
        if (!doc_.is_object()) throw ParseError(path_, "expected an object");
    }
    FieldReader(const FieldReader&) = delete;
    ~FieldReader() noexcept(false) {
        if (std::uncaught_exceptions() > 0) return;
        for (const auto& [key, value] : doc_.items()) {
            if (!used_.count(key)) unknown_.push_back(path_ + "." + key);
        }
    }

    std::string field(const std::string& key) const { return path_ + "." + key; }

    const json* find(const std::string& key) {
        used_.insert(key);
        const auto it = doc_.find(key);
        return it == doc_.end() ? nullptr : &*it;
    }

    void read(const std::string& key, int& out) {
        if (const json* v = find(key)) {
            if (!v->is_number_integer()) throw ParseError(field(key), "expected an integer");
            out = v->get<int>();
        }
    }
    void read(const std::string& key, std::uint64_t& out) {
        if (const json* v = find(key)) {
            if (!v->is_number_integer() || (!v->is_number_unsigned() && v->get<std::int64_t>() < 0)) throw ParseError(field(key), "expected a nonnegative integer");
            out = v->get<std::uint64_t>();
        }
    }
    void read(const std::string& key, double& out) {
        if (const json* v = find(key)) {
            if (!v->is_number()) throw ParseError(field(key), "expected a number");
            out = v->get<double>();
        }
    }
    void read(const std::string& key, bool& out) {
        if (const json* v = find(key)) {
            if (!v->is_boolean()) throw ParseError(field(key), "expected true or false");
            out = v->get<bool>();
        }
    }
    void read(const std::string& key, std::string& out) {
        if (const json* v = find(key)) {
            if (!v->is_string()) throw ParseError(field(key), "expected a string");
            out = v->get<std::string>();
        }
    }
    void read(const std::string& key, std::optional<Eigen::VectorXd>& out) {
        if (const json* v = find(key)) {
            if (!v->is_null()) out = json_vector(*v, field(key));
        }
    }

    template <typename Enum, typename Parse>
    void read_enum(const std::string& key, Enum& out, Parse parse) {
        std::string name;
        read(key, name);
        if (name.empty()) return;
        try {
            out = parse(name);
        } catch (const ArgumentError& e) {
            throw ParseError(field(key), e.what());
        }
    }

private:
    const json& doc_;
    std::string path_;
    std::vector<std::string>& unknown_;
    std::set<std::string> used_;
};

void require_positive(int value, const std::string& path) {
    if (value < 1) throw ParseError(path, "must be at least 1");
}

void parse_solver(const json& doc, SolverConfig& s, std::vector<std::string>& unknown) {
    FieldReader r(doc, "$.solver", unknown);
    r.read("n_segments", s.n_segments);
    r.read("n_t", s.n_t);
    r.read("max_steps", s.max_steps);
    r.read("learning_rate", s.learning_rate);
    r.read("adam_beta1", s.adam_beta1);
    r.read("adam_beta2", s.adam_beta2);
    r.read("adam_eps", s.adam_eps);
    r.read("patience_steps", s.patience_steps);
    r.read("early_stop_delta", s.early_stop_delta);
    r.read("length_n_t", s.length_n_t);
    r.read("multi_start", s.multi_start);
    r.read("n_restarts", s.n_restarts);
    r.read("restart_scale", s.restart_scale);
    r.read_enum("ensemble_redraw", s.ensemble_redraw, parse_ensemble_redraw);
    r.read("verify", s.verify);
    r.read("rank_tol", s.rank_tol);
    try {
        s.validate();
    } catch (const ArgumentError& e) {
        throw ParseError("$.solver", e.what());
    }
}

void parse_family(const json& doc, DiffeoFamily& f, std::vector<std::string>& unknown) {
    FieldReader r(doc, "$.diffeo_family", unknown);
    r.read("kind", f.kind);
    r.read("affine_scale", f.affine_scale);
    r.read("offset_scale", f.offset_scale);
    r.read("coupling_hidden", f.coupling_hidden);
    r.read("coupling_scale", f.coupling_scale);
    r.read("max_retries", f.max_retries);
    static const std::set<std::string> kinds{"identity", "affine", "coupling", "mixed"};
    if (!kinds.count(f.kind)) {
        throw ParseError("$.diffeo_family.kind", "unknown family \"" + f.kind + "\" (expected identity, affine, coupling or mixed)");
    }
    require_positive(f.coupling_hidden, "$.diffeo_family.coupling_hidden");
    if (f.max_retries < 0) throw ParseError("$.diffeo_family.max_retries", "must be nonnegative");
}

void parse_karcher(const json& doc, KarcherSettings& k, std::vector<std::string>& unknown) {
    FieldReader r(doc, "$.karcher", unknown);
    if (const json* pts = r.find("points")) {
        if (!pts->is_array()) throw ParseError("$.karcher.points", "expected an array of points");
        for (std::size_t i = 0; i < pts->size(); ++i) {
            k.points.push_back(json_vector((*pts)[i], "$.karcher.points[" + std::to_string(i) + "]"));
        }
    }
    r.read("n_points", k.n_points);
    r.read("initial_point", k.initial_point);
    r.read("initial_step_fraction", k.initial_step_fraction);
    r.read("shrink", k.shrink);
    r.read("min_step", k.min_step);
    r.read("max_evaluations", k.max_evaluations);
    require_positive(k.n_points, "$.karcher.n_points");
    require_positive(k.max_evaluations, "$.karcher.max_evaluations");
    if (!(k.shrink > 0.0 && k.shrink < 1.0)) throw ParseError("$.karcher.shrink", "must lie in (0, 1)");
    if (!(k.min_step > 0.0)) throw ParseError("$.karcher.min_step", "must be positive");
    if (!(k.initial_step_fraction > 0.0)) throw ParseError("$.karcher.initial_step_fraction", "must be positive");
}

void parse_checks(const json& doc, CheckThresholds& c, std::vector<std::string>& unknown) {
    FieldReader r(doc, "$.checks", unknown);
    r.read("oracle_linear_rel_error", c.oracle_linear_rel_error);
    r.read("oracle_sphere_rel_error", c.oracle_sphere_rel_error);
    r.read("max_geodesic_spread", c.max_geodesic_spread);
    r.read("min_euclidean_spread", c.min_euclidean_spread);
    r.read("min_euclidean_spread_fraction", c.min_euclidean_spread_fraction);
    r.read("max_cv_ratio", c.max_cv_ratio);
    r.read("min_abs_t", c.min_abs_t);
    r.read("karcher_flat_tolerance", c.karcher_flat_tolerance);
    r.read("max_unconverged_fraction", c.max_unconverged_fraction);
}

std::string read_text_file(const std::filesystem::path& path, const std::string& field) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(field, "cannot read file \"" + path.string() + "\"");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

ExperimentConfig parse_config_json(const json& doc, bool strict, const std::string& base_dir) {
    ExperimentConfig cfg;
    std::vector<std::string> unknown;
    {
        FieldReader r(doc, "$", unknown);
        r.read_enum("experiment", cfg.kind, parse_experiment_kind);

        const json* inline_decoder = r.find("decoder");
        const json* decoder_file = r.find("decoder_file");
        if (inline_decoder && decoder_file) {
            throw ParseError("$.decoder_file", "give either decoder or decoder_file, not both");
        }
        if (decoder_file) {
            if (!decoder_file->is_string()) throw ParseError("$.decoder_file", "expected a string");
            std::filesystem::path p = decoder_file->get<std::string>();
            if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
            const std::string text = read_text_file(p, "$.decoder_file");
            try {
                cfg.decoder = json::parse(text);
            } catch (const json::parse_error& e) {
                throw ParseError("$.decoder_file", std::string("malformed JSON: ") + e.what());
            }
            cfg.decoder_source = p.lexically_normal().string();
        } else if (inline_decoder) {
            cfg.decoder = *inline_decoder;
        } else {
            throw ParseError("$.decoder", "missing required field (or decoder_file)");
        }
        // eager validation of the decoder document
        decoder_from_json(cfg.decoder, decoder_file ? "$.decoder_file" : "$.decoder");

        if (const json* s = r.find("solver")) parse_solver(*s, cfg.solver, unknown);
        r.read("n_pairs", cfg.n_pairs);
        r.read("n_models", cfg.n_models);
        require_positive(cfg.n_pairs, "$.n_pairs");
        require_positive(cfg.n_models, "$.n_models");
        if (const json* f = r.find("diffeo_family")) parse_family(*f, cfg.diffeo_family, unknown);
        r.read_enum("ensemble_source", cfg.ensemble_source, [](const std::string& name) {
            if (name == "diffeo") return EnsembleSource::Diffeo;
            if (name == "perturbation") return EnsembleSource::Perturbation;
            throw ArgumentError("unknown ensemble source \"" + name + "\" (expected diffeo or perturbation)");
        });
        r.read("perturbation_scale", cfg.perturbation_scale);
        if (!(cfg.perturbation_scale >= 0.0)) throw ParseError("$.perturbation_scale", "must be nonnegative");
        if (const json* v = r.find("include_identity")) {
            if (!v->is_boolean()) throw ParseError("$.include_identity", "expected true or false");
            cfg.include_identity = v->get<bool>();
        }
        r.read("min_pair_separation", cfg.min_pair_separation);
        if (!(cfg.min_pair_separation >= 0.0 && cfg.min_pair_separation < 1.0)) {
            throw ParseError("$.min_pair_separation", "must lie in [0, 1)");
        }
        r.read("seed", cfg.seed);
        r.read("threads", cfg.threads);
        if (cfg.threads < 0) throw ParseError("$.threads", "must be nonnegative (0 = all hardware threads)");
        if (const json* out = r.find("output")) {
            FieldReader o(*out, "$.output", unknown);
            o.read("path", cfg.output_path);
            o.read_enum("format", cfg.output_format, parse_output_format);
        }
        if (const json* ends = r.find("endpoints")) {
            FieldReader e(*ends, "$.endpoints", unknown);
            e.read("z1", cfg.z1);
            e.read("z2", cfg.z2);
        }
        if (const json* k = r.find("karcher")) parse_karcher(*k, cfg.karcher, unknown);
        if (const json* c = r.find("checks")) parse_checks(*c, cfg.checks, unknown);
    }
    if (!unknown.empty()) {
        if (strict) {
            std::string list;
            for (const auto& key : unknown) list += (list.empty() ? "" : ", ") + key;
            throw ParseError("$", "unknown key(s): " + list);
        }
        cfg.ignored_keys = unknown;
    }
    return cfg;
}

ExperimentConfig parse_config(const std::string& text, bool strict, const std::string& base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("$", std::string("malformed JSON: ") + e.what());
    }
    return parse_config_json(doc, strict, base_dir);
}

ExperimentConfig load_config_file(const std::string& path, bool strict) {
    const std::filesystem::path p(path);
    const std::string text = read_text_file(p, "--config");
    const auto dir = p.has_parent_path() ? p.parent_path().string() : std::string(".");
    return parse_config(text, strict, dir);
}

namespace {

json vector_json(const Eigen::VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

} // namespace

json echo_config(const ExperimentConfig& cfg) {
    const SolverConfig& s = cfg.solver;
    json solver = {{"n_segments", s.n_segments},
                   {"n_t", s.n_t},
                   {"max_steps", s.max_steps},
                   {"learning_rate", s.learning_rate},
                   {"adam_beta1", s.adam_beta1},
                   {"adam_beta2", s.adam_beta2},
                   {"adam_eps", s.adam_eps},
                   {"patience_steps", s.patience_steps},
                   {"early_stop_delta", s.early_stop_delta},
                   {"length_n_t", s.length_n_t},
                   {"multi_start", s.multi_start},
                   {"n_restarts", s.n_restarts},
                   {"restart_scale", s.restart_scale},
                   {"ensemble_redraw", to_string(s.ensemble_redraw)},
                   {"verify", s.verify},
                   {"rank_tol", s.rank_tol}};
    const DiffeoFamily& f = cfg.diffeo_family;
    json family = {{"kind", f.kind},
                   {"affine_scale", f.affine_scale},
                   {"offset_scale", f.offset_scale},
                   {"coupling_hidden", f.coupling_hidden},
                   {"coupling_scale", f.coupling_scale},
                   {"max_retries", f.max_retries}};
    const KarcherSettings& k = cfg.karcher;
    json points = json::array();
    for (const auto& p : k.points) points.push_back(vector_json(p));
    json karcher = {{"points", points},
                    {"n_points", k.n_points},
                    {"initial_step_fraction", k.initial_step_fraction},
                    {"shrink", k.shrink},
                    {"min_step", k.min_step},
                    {"max_evaluations", k.max_evaluations}};
    if (k.initial_point) karcher["initial_point"] = vector_json(*k.initial_point);
    const CheckThresholds& c = cfg.checks;
    json checks = {{"oracle_linear_rel_error", c.oracle_linear_rel_error},
                   {"oracle_sphere_rel_error", c.oracle_sphere_rel_error},
                   {"max_geodesic_spread", c.max_geodesic_spread},
                   {"min_euclidean_spread", c.min_euclidean_spread},
                   {"min_euclidean_spread_fraction", c.min_euclidean_spread_fraction},
                   {"max_cv_ratio", c.max_cv_ratio},
                   {"min_abs_t", c.min_abs_t},
                   {"karcher_flat_tolerance", c.karcher_flat_tolerance},
                   {"max_unconverged_fraction", c.max_unconverged_fraction}};

    json doc = {{"experiment", to_string(cfg.kind)},
                {"decoder", cfg.decoder},
                {"solver", solver},
                {"n_pairs", cfg.n_pairs},
                {"n_models", cfg.n_models},
                {"diffeo_family", family},
                {"ensemble_source", to_string(cfg.ensemble_source)},
                {"perturbation_scale", cfg.perturbation_scale},
                {"min_pair_separation", cfg.min_pair_separation},
                {"seed", cfg.seed},
                {"threads", cfg.threads},
                {"output", {{"path", cfg.output_path}, {"format", to_string(cfg.output_format)}}},
                {"karcher", karcher},
                {"checks", checks}};
    if (cfg.include_identity) doc["include_identity"] = *cfg.include_identity;
    if (cfg.z1 || cfg.z2) {
        json ends = json::object();
        if (cfg.z1) ends["z1"] = vector_json(*cfg.z1);
        if (cfg.z2) ends["z2"] = vector_json(*cfg.z2);
        doc["endpoints"] = ends;
    }
    return doc;
}

// ---------------------------------------------------------------- sampling

std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> sample_pairs(const Box& box, int n_pairs,
                                                                        double min_separation, std::uint64_t seed) {
    if (n_pairs < 1) throw ArgumentError("sample_pairs: n_pairs must be positive");
    auto rng = derived_rng(seed, 0, rng_purpose::kPairs);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto draw = [&] {
        Eigen::VectorXd z(box.dim());
        for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = box.lower(i) + u(rng) * (box.upper(i) - box.lower(i));
        return z;
    };
    const double min_dist = min_separation * box.diagonal();
    std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs;
    pairs.reserve(static_cast<std::size_t>(n_pairs));
    for (int p = 0; p < n_pairs; ++p) {
        for (int attempt = 0;; ++attempt) {
            if (attempt == 10000) throw ArgumentError("sample_pairs: cannot satisfy the minimum pair separation");
            Eigen::VectorXd a = draw(), b = draw();
            if ((a - b).norm() >= min_dist && (a - b).norm() > 0.0) {
                pairs.emplace_back(std::move(a), std::move(b));
                break;
            }
        }
    }
    return pairs;
}

namespace {

Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, double scale, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = scale * normal(rng);
    return m;
}

DiffeoPtr draw_one(const std::string& kind, const DiffeoFamily& family, int dim, std::mt19937_64& rng) {
    if (kind == "identity") return AffineDiffeo::identity(dim);
    if (kind == "affine") {
        Eigen::MatrixXd M = Eigen::MatrixXd::Identity(dim, dim) + gaussian(dim, dim, family.affine_scale, rng);
        Eigen::VectorXd c = gaussian(dim, 1, family.offset_scale, rng);
        return std::make_shared<const AffineDiffeo>(std::move(M), std::move(c));
    }
    if (dim < 2) throw ArgumentError("coupling diffeomorphisms need latent_dim >= 2");
    return CouplingDiffeo::random(dim, dim / 2, family.coupling_hidden, family.coupling_scale, rng);
}

} // namespace

DiffeoPtr draw_diffeo(const DiffeoFamily& family, int dim, std::uint64_t seed, int model, int* retries) {
    auto rng = derived_rng(seed, static_cast<std::uint64_t>(model), rng_purpose::kModels);
    std::string kind = family.kind;
    if (kind == "mixed") kind = model % 2 == 0 ? "affine" : "coupling";
    for (int attempt = 0;; ++attempt) {
        try {
            return draw_one(kind, family, dim, rng);
        } catch (const ArgumentError& e) {
            if (kind == "coupling" && dim < 2) throw;
            if (attempt >= family.max_retries) {
                throw ArgumentError("diffeomorphism draw for model " + std::to_string(model) + " failed after " +
                                    std::to_string(attempt + 1) + " attempts: " + e.what());
            }
            std::cerr << "note: redrawing diffeomorphism for model " << model << " (" << e.what() << ")\n";
            if (retries) ++*retries;
        }
    }
}

namespace {

// ---------------------------------------------------------------- runners

struct Model {
    DecoderPtr decoder;
    DiffeoPtr diffeo; // latent map from base coordinates to this model's coordinates
    std::string label;
};

std::vector<DenseLayer> perturb_layers(const std::vector<DenseLayer>& layers, double scale, std::mt19937_64& rng) {
    std::vector<DenseLayer> out = layers;
    for (auto& layer : out) {
        const double w_rms = std::sqrt(layer.weights.squaredNorm() / static_cast<double>(layer.weights.size()));
        const double b_rms =
            layer.bias.size() ? std::sqrt(layer.bias.squaredNorm() / static_cast<double>(layer.bias.size())) : 0.0;
        layer.weights += gaussian(layer.weights.rows(), layer.weights.cols(), scale * w_rms, rng);
        layer.bias += gaussian(layer.bias.size(), 1, scale * std::max(b_rms, w_rms), rng);
    }
    return out;
}

DecoderPtr perturbed_decoder(const DecoderPtr& base, double scale, std::uint64_t seed, int model) {
    auto rng = derived_rng(seed, static_cast<std::uint64_t>(model), rng_purpose::kPerturbation);
    if (const auto* mlp = dynamic_cast<const MlpDecoder*>(base.get())) {
        return std::make_shared<const MlpDecoder>(perturb_layers(mlp->layers(), scale, rng), mlp->domain());
    }
    if (const auto* lin = dynamic_cast<const LinearDecoder*>(base.get())) {
        const double rms = std::sqrt(lin->weights().squaredNorm() / static_cast<double>(lin->weights().size()));
        for (int attempt = 0; attempt < 16; ++attempt) {
            try {
                return std::make_shared<const LinearDecoder>(
                    lin->weights() + gaussian(lin->weights().rows(), lin->weights().cols(), scale * rms, rng), lin->bias(),
                    lin->domain());
            } catch (const ArgumentError&) {
            }
        }
        throw ArgumentError("weight perturbation keeps producing rank-deficient linear decoders");
    }
    throw ArgumentError("ensemble_source \"perturbation\" needs an mlp or linear decoder, got \"" + base->kind() + "\"");
}

struct RunContext {
    const ExperimentConfig& cfg;
    DecoderPtr decoder;
    int diffeo_retries = 0;
};

json base_provenance(const RunContext& ctx) {
    json prov = {{"library", "idgeo"},
                 {"version", kLibraryVersion},
                 {"schema", kReportSchema},
                 {"experiment", to_string(ctx.cfg.kind)},
                 {"seed", ctx.cfg.seed},
                 {"decoder_source", ctx.cfg.decoder_source},
                 {"decoder_kind", ctx.decoder->kind()},
                 {"injectivity_certified", ctx.decoder->injectivity_certified()},
                 {"std_estimator", "sample standard deviation, n - 1 denominator"},
                 {"t_test", "two-sample Student t, pooled variance, df = n1 + n2 - 2; p_value = P(T <= t) for "
                            "H1: mean cv_geodesic < mean cv_euclidean; p_value_upper = P(T >= t)"},
                 {"pair_sampling", "uniform in the decoder domain box; pairs closer than min_pair_separation times "
                                   "the box diagonal are redrawn"},
                 {"solver_seeds", "per task: splitmix64(seed, task index), task = pair * models + model"}};
    if (!ctx.decoder->injectivity_certified()) prov["injectivity_note"] = "decoder injectivity is assumed, not verified";
    if (!ctx.cfg.ignored_keys.empty()) prov["ignored_keys"] = ctx.cfg.ignored_keys;
    return prov;
}

SolverConfig task_solver(const ExperimentConfig& cfg, std::uint64_t task) {
    SolverConfig s = cfg.solver;
    s.seed = mix_seed(cfg.seed, task);
    return s;
}

DistanceSample make_sample(int pair, int model, double d_e, const GeodesicSolution& sol) {
    DistanceSample s;
    s.pair_id = pair;
    s.model_id = model;
    s.d_euclidean = d_e;
    s.d_geodesic = sol.length;
    s.converged = sol.converged;
    s.steps = sol.steps_taken;
    s.energy = sol.energy;
    return s;
}

void add_unconverged_check(ExperimentReport& report) {
    const auto& recs = report.records;
    const auto bad = std::count_if(recs.begin(), recs.end(), [](const DistanceSample& s) { return !s.converged; });
    report.unconverged_fraction = recs.empty() ? 0.0 : static_cast<double>(bad) / static_cast<double>(recs.size());
    const double limit = report.config.checks.max_unconverged_fraction;
    report.checks.push_back({"unconverged_fraction", report.unconverged_fraction <= limit, report.unconverged_fraction,
                             limit, std::to_string(bad) + " of " + std::to_string(recs.size()) + " solves unconverged"});
}

double relative_spread(const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    return mean > 0.0 ? (*hi - *lo) / mean : 0.0;
}

// Builds the models for invariance / cv experiments.
std::vector<Model> build_models(RunContext& ctx, bool perturb) {
    const ExperimentConfig& cfg = ctx.cfg;
    const int dim = ctx.decoder->latent_dim();
    std::vector<Model> models;
    if (cfg.uses_identity_model()) {
        models.push_back({ctx.decoder, AffineDiffeo::identity(dim), "identity"});
    }
    for (int k = 0; k < cfg.n_models; ++k) {
        DiffeoPtr A = draw_diffeo(cfg.diffeo_family, dim, cfg.seed, k, &ctx.diffeo_retries);
        DecoderPtr base = perturb ? perturbed_decoder(ctx.decoder, cfg.perturbation_scale, cfg.seed, k) : ctx.decoder;
        const std::string label = (perturb ? "perturbed+" : "") + A->kind();
        models.push_back({reparametrize(base, A), A, label});
    }
    return models;
}

// Runs every (pair, model) solve and fills records and per-pair statistics.
void run_model_grid(const ExperimentConfig& cfg, const std::vector<Model>& models,
                    const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& pairs, ExperimentReport& report) {
    const std::size_t M = models.size();
    const std::size_t tasks = pairs.size() * M;
    std::vector<std::optional<DistanceSample>> results(tasks);
    parallel_for(tasks, cfg.threads, [&](std::size_t task) {
        const std::size_t p = task / M, m = task % M;
        const Model& model = models[m];
        const Eigen::VectorXd a = model.diffeo->apply(pairs[p].first);
        const Eigen::VectorXd b = model.diffeo->apply(pairs[p].second);
        const auto sol = solve_geodesic(*model.decoder, a, b, task_solver(cfg, task));
        results[task] = make_sample(static_cast<int>(p), static_cast<int>(m), (b - a).norm(), sol);
    });
    report.records.reserve(tasks);
    for (auto& r : results) report.records.push_back(*r);
}

struct PairStats {
    std::vector<double> geodesic_spread, euclidean_spread;
};

PairStats per_pair_statistics(ExperimentReport& report, std::size_t n_pairs, std::size_t n_models) {
    PairStats stats;
    const bool cv_defined = n_models >= 2;
    for (std::size_t p = 0; p < n_pairs; ++p) {
        std::vector<double> dg, de;
        for (std::size_t m = 0; m < n_models; ++m) {
            const auto& s = report.records[p * n_models + m];
            dg.push_back(s.d_geodesic);
            de.push_back(s.d_euclidean);
        }
        stats.geodesic_spread.push_back(relative_spread(dg));
        stats.euclidean_spread.push_back(relative_spread(de));
        if (cv_defined) {
            report.cv_geodesic.push_back(coefficient_of_variation(dg));
            report.cv_euclidean.push_back(coefficient_of_variation(de));
        }
    }
    if (cv_defined && report.cv_geodesic.size() >= 2) {
        try {
            report.t_test = one_sided_t_test(report.cv_geodesic, report.cv_euclidean);
        } catch (const ArgumentError&) {
            // both CV samples constant: no test
        }
    }
    return stats;
}

double mean_of(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void add_cv_checks(ExperimentReport& report) {
    const CheckThresholds& c = report.config.checks;
    const double mg = mean_of(report.cv_geodesic), me = mean_of(report.cv_euclidean);
    const double ratio = me > 0.0 ? mg / me : INFINITY;
    report.details["mean_cv_geodesic"] = mg;
    report.details["mean_cv_euclidean"] = me;
    report.details["cv_ratio"] = ratio;
    report.checks.push_back({"cv_ratio", ratio < c.max_cv_ratio, ratio, c.max_cv_ratio,
                             "mean CV(geodesic) / mean CV(euclidean)"});
    const double t = report.t_test ? report.t_test->t : NAN;
    report.checks.push_back({"t_statistic", report.t_test && t < 0.0 && std::abs(t) >= c.min_abs_t, t, -c.min_abs_t,
                             "negative with |t| >= threshold"});
}

Eigen::VectorXd arithmetic_mean(const std::vector<Eigen::VectorXd>& pts) {
    Eigen::VectorXd m = Eigen::VectorXd::Zero(pts.front().size());
    for (const auto& p : pts) m += p;
    return m / static_cast<double>(pts.size());
}

ExperimentReport start_report(RunContext& ctx) {
    ExperimentReport report;
    report.config = ctx.cfg;
    return report;
}

void finish_report(RunContext& ctx, ExperimentReport& report) {
    add_unconverged_check(report);
    report.provenance = base_provenance(ctx);
    if (ctx.diffeo_retries) report.provenance["diffeo_retries"] = ctx.diffeo_retries;
}

} // namespace

bool ExperimentReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

ExperimentReport run_oracle_experiment(const ExperimentConfig& cfg) {
    RunContext ctx{cfg, decoder_from_json(cfg.decoder, "$.decoder")};
    const auto* linear = dynamic_cast<const LinearDecoder*>(ctx.decoder.get());
    const auto* sphere = dynamic_cast<const SphereChartDecoder*>(ctx.decoder.get());
    if (!linear && !sphere) {
        throw UnsupportedError("oracle experiment needs a linear or sphere decoder, got \"" + ctx.decoder->kind() + "\"");
    }
    ExperimentReport report = start_report(ctx);
    auto pairs = sample_pairs(ctx.decoder->domain(), cfg.n_pairs, cfg.min_pair_separation, cfg.seed);
    pairs.emplace_back(pairs.front().first, pairs.front().first); // injected degenerate pair
    const int degenerate_id = cfg.n_pairs;

    auto oracle = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        if (linear) return (linear->weights() * (b - a)).norm();
        const double r = sphere->radius();
        const Eigen::VectorXd x = sphere->decode(a) / r, y = sphere->decode(b) / r;
        return r * std::acos(std::clamp(x.dot(y), -1.0, 1.0));
    };

    std::vector<std::optional<GeodesicSolution>> sols(pairs.size());
    parallel_for(pairs.size(), cfg.threads, [&](std::size_t p) {
        sols[p] = solve_geodesic(*ctx.decoder, pairs[p].first, pairs[p].second, task_solver(cfg, p));
    });

    json oracle_lengths = json::array(), rel_errors = json::array();
    double worst = 0.0;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const auto& [a, b] = pairs[p];
        report.records.push_back(make_sample(static_cast<int>(p), 0, (b - a).norm(), *sols[p]));
        const double exact = oracle(a, b);
        oracle_lengths.push_back(exact);
        if (static_cast<int>(p) == degenerate_id) {
            rel_errors.push_back(nullptr);
            continue;
        }
        const double err = std::abs(sols[p]->length - exact) / exact;
        rel_errors.push_back(err);
        worst = std::max(worst, err);
    }
    const double tol = linear ? cfg.checks.oracle_linear_rel_error : cfg.checks.oracle_sphere_rel_error;
    report.details["oracle"] = linear ? "linear: |W (z2 - z1)|" : "sphere: r * arccos(x1 . x2 / r^2)";
    report.details["oracle_lengths"] = oracle_lengths;
    report.details["relative_errors"] = rel_errors;
    report.details["max_relative_error"] = worst;
    report.details["degenerate_pairs"] = json::array({degenerate_id});
    report.checks.push_back({"max_relative_error", worst <= tol, worst, tol, "solver length vs closed form"});
    const double degenerate_length = report.records.back().d_geodesic;
    report.checks.push_back({"degenerate_pair_length", degenerate_length == 0.0, degenerate_length, 0.0,
                             "pair " + std::to_string(degenerate_id) + " has z1 = z2"});
    finish_report(ctx, report);
    return report;
}

ExperimentReport run_invariance_experiment(const ExperimentConfig& cfg) {
    RunContext ctx{cfg, decoder_from_json(cfg.decoder, "$.decoder")};
    ExperimentReport report = start_report(ctx);
    const auto models = build_models(ctx, false);
    const auto pairs = sample_pairs(ctx.decoder->domain(), cfg.n_pairs, cfg.min_pair_separation, cfg.seed);
    run_model_grid(cfg, models, pairs, report);
    const PairStats stats = per_pair_statistics(report, pairs.size(), models.size());

    json labels = json::array();
    for (const auto& m : models) labels.push_back(m.label);
    report.details["models"] = labels;
    report.details["geodesic_spread"] = stats.geodesic_spread;
    report.details["euclidean_spread"] = stats.euclidean_spread;
    report.details["ensemble_surrogate"] = "exact reparametrization f o A_m^-1";

    const CheckThresholds& c = cfg.checks;
    const double worst = *std::max_element(stats.geodesic_spread.begin(), stats.geodesic_spread.end());
    report.checks.push_back({"max_geodesic_spread", worst <= c.max_geodesic_spread, worst, c.max_geodesic_spread,
                             "per-pair (max - min) / mean of geodesic distances across models"});
    if (cfg.diffeo_family.kind != "identity" && models.size() >= 2) {
        const auto wide = std::count_if(stats.euclidean_spread.begin(), stats.euclidean_spread.end(),
                                        [&](double s) { return s > c.min_euclidean_spread; });
        const double frac = static_cast<double>(wide) / static_cast<double>(pairs.size());
        report.checks.push_back({"euclidean_spread_fraction", frac >= c.min_euclidean_spread_fraction, frac,
                                 c.min_euclidean_spread_fraction,
                                 "fraction of pairs whose euclidean spread exceeds " + format_double(c.min_euclidean_spread)});
    }
    finish_report(ctx, report);
    return report;
}

ExperimentReport run_cv_experiment(const ExperimentConfig& cfg) {
    RunContext ctx{cfg, decoder_from_json(cfg.decoder, "$.decoder")};
    const bool perturb = cfg.ensemble_source == EnsembleSource::Perturbation;
    ExperimentReport report = start_report(ctx);
    const auto models = build_models(ctx, perturb);
    if (models.size() < 2) throw ArgumentError("cv experiment needs at least two models (CV is undefined otherwise)");
    const auto pairs = sample_pairs(ctx.decoder->domain(), cfg.n_pairs, cfg.min_pair_separation, cfg.seed);
    run_model_grid(cfg, models, pairs, report);
    per_pair_statistics(report, pairs.size(), models.size());
    report.details["ensemble_surrogate"] =
        perturb ? "independent weight perturbations (approximate retraining), each reparametrized by A_m"
                : "exact reparametrization f o A_m^-1";
    add_cv_checks(report);
    finish_report(ctx, report);
    return report;
}

ExperimentReport run_geodesic(const ExperimentConfig& cfg) {
    RunContext ctx{cfg, decoder_from_json(cfg.decoder, "$.decoder")};
    if (!cfg.z1 || !cfg.z2) throw ArgumentError("geodesic experiment needs endpoints.z1 and endpoints.z2");
    ExperimentReport report = start_report(ctx);
    const auto sol = solve_geodesic(*ctx.decoder, *cfg.z1, *cfg.z2, task_solver(cfg, 0));
    report.records.push_back(make_sample(0, 0, (*cfg.z2 - *cfg.z1).norm(), sol));

    CurveTable table{time_grid(cfg.solver.length_n_t), {}, {}, sol};
    const Eigen::Index n = table.t.size();
    table.latent.resize(n, ctx.decoder->latent_dim());
    table.decoded.resize(n, ctx.decoder->ambient_dim());
    for (Eigen::Index i = 0; i < n; ++i) {
        table.latent.row(i) = curve_eval(sol.curve, table.t(i)).transpose();
        table.decoded.row(i) = ctx.decoder->decode(table.latent.row(i).transpose()).transpose();
    }
    report.curve = std::move(table);

    report.details["energy"] = sol.energy;
    report.details["initial_energy"] = sol.initial_energy;
    report.details["length"] = sol.length;
    report.details["steps"] = sol.steps_taken;
    report.details["converged"] = sol.converged;
    report.details["min_singular_value"] = sol.min_singular_value_seen;
    report.details["left_domain"] = sol.left_domain;
    report.details["energy_trace"] = sol.energy_trace;
    bool monotone = true;
    for (std::size_t i = 1; i < sol.energy_trace.size(); ++i) monotone = monotone && sol.energy_trace[i] <= sol.energy_trace[i - 1];
    report.checks.push_back({"energy_trace_monotone", monotone, monotone ? 1.0 : 0.0, 1.0, "best-so-far energy never increases"});
    finish_report(ctx, report);
    return report;
}

ExperimentReport run_karcher_experiment(const ExperimentConfig& cfg) {
    RunContext ctx{cfg, decoder_from_json(cfg.decoder, "$.decoder")};
    ExperimentReport report = start_report(ctx);
    std::vector<Eigen::VectorXd> points = cfg.karcher.points;
    if (points.empty()) {
        auto rng = derived_rng(cfg.seed, 0, rng_purpose::kKarcherPoints);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const Box& box = ctx.decoder->domain();
        for (int i = 0; i < cfg.karcher.n_points; ++i) {
            Eigen::VectorXd z(box.dim());
            for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = box.lower(j) + u(rng) * (box.upper(j) - box.lower(j));
            points.push_back(std::move(z));
        }
    }
    SolverConfig solver = cfg.solver;
    solver.seed = cfg.seed;
    KarcherOptions opts;
    opts.initial_step_fraction = cfg.karcher.initial_step_fraction;
    opts.shrink = cfg.karcher.shrink;
    opts.min_step = cfg.karcher.min_step;
    opts.max_evaluations = cfg.karcher.max_evaluations;
    opts.initial_point = cfg.karcher.initial_point;
    opts.threads = cfg.threads;
    const KarcherResult result = karcher_mean(*ctx.decoder, points, solver, opts);

    std::vector<std::optional<DistanceSample>> samples(points.size());
    parallel_for(points.size(), cfg.threads, [&](std::size_t i) {
        const auto sol = solve_geodesic(*ctx.decoder, result.mean, points[i], task_solver(cfg, i));
        samples[i] = make_sample(static_cast<int>(i), 0, (points[i] - result.mean).norm(), sol);
    });
    for (auto& s : samples) report.records.push_back(*s);

    const Eigen::VectorXd arith = arithmetic_mean(points);
    json pts = json::array();
    for (const auto& p : points) pts.push_back(vector_json(p));
    report.details["points"] = pts;
    report.details["karcher_mean"] = vector_json(result.mean);
    report.details["arithmetic_mean"] = vector_json(arith);
    report.details["psi"] = result.psi;
    report.details["evaluations"] = result.evaluations;
    report.details["iterations"] = result.iterations;
    report.details["final_step"] = result.final_step;
    report.details["search"] = "compass search, initial step = initial_step_fraction * bounding-box diagonal, "
                               "shrink on failure, stop below min_step";
    report.checks.push_back({"karcher_converged", result.converged, result.final_step, cfg.karcher.min_step,
                             "final compass step below min_step within the evaluation budget"});
    if (ctx.decoder->kind() == "linear") {
        const double dev = (result.mean - arith).cwiseAbs().maxCoeff();
        report.checks.push_back({"flat_mean_deviation", dev <= cfg.checks.karcher_flat_tolerance, dev,
                                 cfg.checks.karcher_flat_tolerance, "max coordinate distance to the arithmetic mean"});
    }
    finish_report(ctx, report);
    return report;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    switch (cfg.kind) {
    case ExperimentKind::Oracle: return run_oracle_experiment(cfg);
    case ExperimentKind::Invariance: return run_invariance_experiment(cfg);
    case ExperimentKind::Cv: return run_cv_experiment(cfg);
    case ExperimentKind::Geodesic: return run_geodesic(cfg);
    case ExperimentKind::Karcher: return run_karcher_experiment(cfg);
    }
    throw ArgumentError("unknown experiment kind");
}

// ---------------------------------------------------------------- output

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

namespace {

json checks_json(const std::vector<Check>& checks) {
    json out = json::array();
    for (const auto& c : checks) {
        out.push_back({{"name", c.name},
                       {"passed", c.passed},
                       {"value", std::isfinite(c.value) ? json(c.value) : json(nullptr)},
                       {"threshold", c.threshold},
                       {"detail", c.detail}});
    }
    return out;
}

json summary_json(const ExperimentReport& r) {
    json s = r.details;
    s["cv_geodesic"] = r.cv_geodesic;
    s["cv_euclidean"] = r.cv_euclidean;
    s["t_statistic"] = r.t_test ? json(r.t_test->t) : json(nullptr);
    s["p_value"] = r.t_test ? json(r.t_test->p_value) : json(nullptr);
    s["p_value_upper"] = r.t_test ? json(r.t_test->p_value_upper) : json(nullptr);
    s["df"] = r.t_test ? json(r.t_test->df) : json(nullptr);
    s["unconverged_fraction"] = r.unconverged_fraction;
    s["checks"] = checks_json(r.checks);
    s["passed"] = r.passed();
    return s;
}

void write_summary_line(std::ostream& out, const std::string& key, const json& value) {
    out << "# summary " << key << "=";
    if (value.is_number_float()) {
        out << format_double(value.get<double>());
    } else if (value.is_array() && std::all_of(value.begin(), value.end(), [](const json& v) { return v.is_number(); })) {
        bool first = true;
        for (const auto& v : value) {
            out << (first ? "" : ",") << (v.is_number_float() ? format_double(v.get<double>()) : v.dump());
            first = false;
        }
    } else if (value.is_string()) {
        out << value.get<std::string>();
    } else {
        out << value.dump();
    }
    out << "\n";
}

} // namespace

nlohmann::json report_to_json(const ExperimentReport& report) {
    json records = json::array();
    for (const auto& s : report.records) {
        records.push_back({{"pair_id", s.pair_id},
                           {"model_id", s.model_id},
                           {"d_euclidean", s.d_euclidean},
                           {"d_geodesic", s.d_geodesic},
                           {"converged", s.converged},
                           {"steps", s.steps},
                           {"energy", s.energy}});
    }
    json doc = {{"config", echo_config(report.config)},
                {"records", records},
                {"summary", summary_json(report)},
                {"provenance", report.provenance}};
    if (report.curve) {
        const CurveTable& c = *report.curve;
        json rows = json::array();
        for (Eigen::Index i = 0; i < c.t.size(); ++i) {
            rows.push_back({{"t", c.t(i)},
                            {"z", vector_json(c.latent.row(i).transpose())},
                            {"x", vector_json(c.decoded.row(i).transpose())}});
        }
        doc["curve"] = rows;
    }
    return doc;
}

void write_csv(const ExperimentReport& report, std::ostream& out) {
    out << "# " << kReportSchema << "\n";
    out << "# config " << echo_config(report.config).dump() << "\n";
    out << "# provenance " << report.provenance.dump() << "\n";
    if (report.curve) {
        const CurveTable& c = *report.curve;
        out << "t";
        for (Eigen::Index j = 0; j < c.latent.cols(); ++j) out << ",z" << j;
        for (Eigen::Index j = 0; j < c.decoded.cols(); ++j) out << ",x" << j;
        out << "\n";
        for (Eigen::Index i = 0; i < c.t.size(); ++i) {
            out << format_double(c.t(i));
            for (Eigen::Index j = 0; j < c.latent.cols(); ++j) out << "," << format_double(c.latent(i, j));
            for (Eigen::Index j = 0; j < c.decoded.cols(); ++j) out << "," << format_double(c.decoded(i, j));
            out << "\n";
        }
    } else {
        out << kCsvHeader << "\n";
        for (const auto& s : report.records) {
            out << s.pair_id << "," << s.model_id << "," << format_double(s.d_euclidean) << ","
                << format_double(s.d_geodesic) << "," << (s.converged ? "true" : "false") << "," << s.steps << ","
                << format_double(s.energy) << "\n";
        }
    }
    const json summary = summary_json(report);
    for (const auto& [key, value] : summary.items()) {
        if (key == "checks") continue;
        write_summary_line(out, key, value);
    }
    for (const auto& c : report.checks) {
        out << "# check " << c.name << " " << (c.passed ? "PASS" : "FAIL") << " value=" << format_double(c.value)
            << " threshold=" << format_double(c.threshold) << "\n";
    }
}

void write_report(const ExperimentReport& report, const std::string& path, OutputFormat format) {
    auto emit = [&](std::ostream& out) {
        if (format == OutputFormat::Json) {
            out << report_to_json(report).dump(2) << "\n";
        } else {
            write_csv(report, out);
        }
    };
    if (path.empty() || path == "-") {
        emit(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArgumentError("cannot open output file \"" + path + "\"");
    emit(out);
    if (!out) throw ArgumentError("failed writing output file \"" + path + "\"");
}

std::vector<DistanceSample> read_csv_records(std::istream& in) {
    std::vector<DistanceSample> records;
    std::string line;
    bool header_seen = false;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const std::string where = "line " + std::to_string(line_no);
        if (!header_seen) {
            if (line != kCsvHeader) throw ParseError(where, "expected header \"" + std::string(kCsvHeader) + "\"");
            header_seen = true;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        if (cells.size() != 7) throw ParseError(where, "expected 7 columns");
        auto number = [&](const std::string& text, auto& out, const char* column) {
            const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
            if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
                throw ParseError(where + "." + column, "malformed value \"" + text + "\"");
            }
        };
        DistanceSample s;
        number(cells[0], s.pair_id, "pair_id");
        number(cells[1], s.model_id, "model_id");
        number(cells[2], s.d_euclidean, "d_euclidean");
        number(cells[3], s.d_geodesic, "d_geodesic");
        if (cells[4] != "true" && cells[4] != "false") throw ParseError(where + ".converged", "expected true or false");
        s.converged = cells[4] == "true";
        number(cells[5], s.steps, "steps");
        number(cells[6], s.energy, "energy");
        records.push_back(s);
    }
    if (!header_seen) throw ParseError("line " + std::to_string(line_no), "no record header found");
    return records;
}

} // namespace idgeo
