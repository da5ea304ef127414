// idgeo: run geodesic-distance experiments from a JSON config.
//
//   idgeo cv --config configs/cv_sphere.json --seed 3 --out cv.csv
//
// Exit status: 0 all checks passed, 1 a check failed, 2 bad arguments or
// config, 3 numerical failure.

#include <chrono>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "idgeo/errors.hpp"
#include "idgeo/experiment.hpp"

namespace {

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<int> threads;
    bool strict = false;
};

void add_common_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--config", o.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "override the config seed");
    cmd->add_option("--out", o.out, "output path, '-' for stdout");
    cmd->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--threads", o.threads, "worker threads, 0 = all hardware threads")->check(CLI::NonNegativeNumber);
    cmd->add_flag("--strict", o.strict, "reject unknown config keys");
}

int run(idgeo::ExperimentKind kind, const Options& o) {
    idgeo::ExperimentConfig cfg = idgeo::load_config_file(o.config, o.strict);
    if (cfg.kind != kind) {
        std::cerr << "note: config declares experiment \"" << idgeo::to_string(cfg.kind) << "\", running \""
                  << idgeo::to_string(kind) << "\"\n";
    }
    cfg.kind = kind;
    if (o.seed) cfg.seed = *o.seed;
    if (o.out) cfg.output_path = *o.out;
    if (o.format) cfg.output_format = idgeo::parse_output_format(*o.format);
    if (o.threads) cfg.threads = *o.threads;
    for (const auto& key : cfg.ignored_keys) std::cerr << "warning: ignoring unknown config key " << key << "\n";

    const auto start = std::chrono::steady_clock::now();
    const idgeo::ExperimentReport report = idgeo::run_experiment(cfg);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    idgeo::write_report(report, cfg.output_path, cfg.output_format);
    for (const auto& c : report.checks) {
        std::cerr << (c.passed ? "PASS " : "FAIL ") << c.name << " value=" << idgeo::format_double(c.value)
                  << " threshold=" << idgeo::format_double(c.threshold) << "\n";
    }
    std::cerr << report.records.size() << " records in " << seconds << " s\n";
    return report.exit_code();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reparametrization-invariant geodesic distances between latent points"};
    app.set_version_flag("--version", idgeo::kLibraryVersion);
    app.require_subcommand(1);

    Options options;
    std::optional<idgeo::ExperimentKind> chosen;
    const std::pair<idgeo::ExperimentKind, const char*> commands[] = {
        {idgeo::ExperimentKind::Oracle, "compare solver lengths against closed-form geodesics"},
        {idgeo::ExperimentKind::Invariance, "geodesic vs euclidean spread across reparametrized decoders"},
        {idgeo::ExperimentKind::Cv, "per-pair coefficients of variation and a one-sided t-test"},
        {idgeo::ExperimentKind::Geodesic, "solve and sample a single geodesic"},
        {idgeo::ExperimentKind::Karcher, "Karcher mean of a point set"},
    };
    for (const auto& [kind, help] : commands) {
        CLI::App* cmd = app.add_subcommand(idgeo::to_string(kind), help);
        add_common_flags(cmd, options);
        cmd->callback([&chosen, k = kind] { chosen = k; });
    }
    CLI11_PARSE(app, argc, argv);

    try {
        return run(*chosen, options);
    } catch (const idgeo::ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const idgeo::ArgumentError& e) {
        std::cerr << "argument error: " << e.what() << "\n";
        return 2;
    } catch (const idgeo::UnsupportedError& e) {
        std::cerr << "unsupported: " << e.what() << "\n";
        return 2;
    } catch (const idgeo::NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
