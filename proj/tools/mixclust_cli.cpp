#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mixclust/bench.hpp"
#include "mixclust/errors.hpp"
#include "mixclust/model_io.hpp"
#include "mixclust/verify.hpp"

namespace {

using mixclust::ExperimentConfig;

struct Flags {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::string format = "csv";
    bool plots = false;
};

void apply_flags(ExperimentConfig& cfg, const Flags& f) {
    if (f.seed) cfg.seed = *f.seed;
    if (f.out) cfg.output = *f.out;
}

int cmd_validate(const std::string& path) {
    const mixclust::MixtureModel m = mixclust::load_model(path);
    const auto nd = mixclust::check_non_degeneracy(m);
    std::printf("valid model: K=%d F=%ld spherical=%s non-degenerate=%s\n", m.k(),
                static_cast<long>(m.dim()), m.is_spherical() ? "yes" : "no", nd.holds ? "yes" : "no");
    if (!nd.holds) std::printf("%s\n", nd.diagnostic.c_str());
    return 0;
}

int cmd_report(const std::string& path) {
    const mixclust::MixtureModel m = mixclust::load_model(path);
    nlohmann::json j = mixclust::to_json(mixclust::separability_report(m));
    j["non_degeneracy"] = mixclust::to_json(mixclust::check_non_degeneracy(m));
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_run(const std::string& path, const Flags& f) {
    ExperimentConfig cfg = mixclust::load_config(path);
    apply_flags(cfg, f);
    const std::size_t n = cfg.n_grid.front();
    const mixclust::SeparationCase c = cfg.cases.front();
    std::vector<mixclust::TrialRecord> records;
    for (int t = 0; t < cfg.trials; ++t) records.push_back(mixclust::run_trial(cfg, n, c, t));
    if (f.format == "json") {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& r : records) rows.push_back(mixclust::to_json(r));
        std::cout << rows.dump(2) << "\n";
    } else {
        std::cout << mixclust::to_csv(cfg, records);
    }
    return 0;
}

int cmd_sweep(const std::string& path, const Flags& f) {
    ExperimentConfig cfg = mixclust::load_config(path);
    apply_flags(cfg, f);
    const mixclust::SweepResult res = mixclust::sweep(cfg);
    mixclust::write_sweep(cfg, res, f.format == "json", f.plots);
    std::fprintf(stderr, "wrote %zu trials to %s\n", res.records.size(), cfg.output.string().c_str());
    return 0;
}

int cmd_verify(const Flags& f, const std::vector<int>& ids) {
    mixclust::VerifyOptions opts;
    if (f.seed) opts.seed = *f.seed;
    int failed = 0;
    for (const auto& r : mixclust::run_acceptance(opts, ids)) {
        std::printf("%s\n", mixclust::format_result(r).c_str());
        std::fflush(stdout);
        if (!r.passed) ++failed;
    }
    std::printf("%d failed\n", failed);
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mixture-model clustering bounds and dimensionality-reduction experiments"};
    app.require_subcommand(1);
    Flags flags;
    app.add_option("--seed", flags.seed, "Master seed (overrides the config)");
    app.add_option("--out", flags.out, "Output directory (overrides the config)");
    app.add_option("--format", flags.format, "Trial output format")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_flag("--plots", flags.plots, "Write SVG charts next to the sweep output");

    std::string model_path, report_path, run_path, sweep_path;
    std::vector<int> ids;
    auto* model = app.add_subcommand("model", "Model file utilities");
    model->require_subcommand(1);
    auto* validate = model->add_subcommand("validate", "Check a model file");
    validate->add_option("file", model_path, "Model JSON")->required();
    auto* report = app.add_subcommand("report", "Separability report of a model as JSON");
    report->add_option("model-file", report_path, "Model JSON")->required();
    auto* run = app.add_subcommand("run", "Run the trials of the first (case, N) cell");
    run->add_option("config-file", run_path, "Experiment JSON")->required();
    auto* sweep = app.add_subcommand("sweep", "Run every cell and write CSV/JSON/SVG");
    sweep->add_option("config-file", sweep_path, "Experiment JSON")->required();
    auto* verify = app.add_subcommand("verify", "Run the acceptance suite");
    verify->add_option("ids", ids, "Criterion ids (default: all)");
    app.fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*validate) return cmd_validate(model_path);
        if (*report) return cmd_report(report_path);
        if (*run) return cmd_run(run_path, flags);
        if (*sweep) return cmd_sweep(sweep_path, flags);
        if (*verify) return cmd_verify(flags, ids);
    } catch (const mixclust::IoError& e) {
        std::fprintf(stderr, "I/O error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
