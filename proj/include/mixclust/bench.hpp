#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mixclust/clustering.hpp"
#include "mixclust/dimred.hpp"
#include "mixclust/mixture_models.hpp"

namespace mixclust {

/// How component variances are set before sampling. `Well` and `Moderate`
/// put delta0 / zeta(w_min) near 1/4 and 1; `Custom` scales the moderate
/// variance by `multiplier`; `AsIs` keeps a file model's own components.
struct SeparationCase {
    enum class Kind { Well, Moderate, Custom, AsIs };
    Kind kind = Kind::Well;
    double multiplier = 1.0;

    std::string name() const;
    static SeparationCase well() { return {Kind::Well, 0.25}; }
    static SeparationCase moderate() { return {Kind::Moderate, 1.0}; }
    static SeparationCase custom(double m) { return {Kind::Custom, m}; }
    static SeparationCase as_is() { return {Kind::AsIs, 0.0}; }
};

struct ReducerSpec {
    ReductionMethod method = ReductionMethod::Pca;
    Eigen::Index dim = 0;     ///< 0 picks the default: K-1 (PCA), K (SVD, randomized SVD)
    Eigen::Index sketch = 0;  ///< randomized SVD only; 0 means K + 10

    std::string name() const;
};

struct ExperimentConfig {
    std::optional<std::filesystem::path> model_file;
    std::uint64_t mean_seed = 0;  ///< hypercube means when no model file is given
    int k = 2;
    Eigen::Index f = 100;
    std::vector<double> weights;  ///< empty means equal weights
    std::vector<std::size_t> n_grid;
    std::vector<SeparationCase> cases{SeparationCase::well()};
    double eps_sep = 1e-6;
    KMeansConfig kmeans;
    std::vector<ReducerSpec> reducers{ReducerSpec{}};
    int trials = 1;
    std::uint64_t seed = 0;
    /// Hypercube models only: draw fresh means for every trial from
    /// derive_seed(mean_seed, trial) instead of fixing them for the sweep.
    bool redraw_means_per_trial = false;
    std::filesystem::path output = "out";

    /// Throws ValidationError on an empty or non-increasing N grid, trials < 1,
    /// K < 2, or an inconsistent model source.
    void validate() const;
};

/// Parses an experiment document. Unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& doc);
/// Reads a config file; a relative model_file is resolved against its directory.
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

struct ReducerOutcome {
    std::string name;
    double me = 0.0;
    double gamma = 0.0;
};

struct TrialRecord {
    std::size_t n = 0;
    Eigen::Index f = 0;
    int k = 0;
    std::string case_name;
    std::uint64_t trial_seed = 0;
    double d_org = 0.0;
    std::optional<double> dbar_org;
    std::optional<double> dbar_org_emp;
    double d_pca = 0.0;
    std::optional<double> dbar_pca;
    std::optional<double> dbar_pca_emp;
    std::vector<ReducerOutcome> reducers;
    double t_full_ms = 0.0;
    double t_reduce_ms = 0.0;
    double t_reduced_kmeans_ms = 0.0;
    bool dbar_org_applicable = false;
    bool dbar_org_emp_applicable = false;
    bool dbar_pca_applicable = false;
    bool dbar_pca_emp_applicable = false;
};

/// Replaces every component by N(0, sigma^2 I) with
/// sigma^2 = c * lambda_min * zeta(w_min - eps_sep) / (K-1), c = 1/4 (well),
/// 1 (moderate) or the custom multiplier. `AsIs` returns the model unchanged.
/// Throws ValidationError when lambda_min is zero.
MixtureModel set_case_variances(const MixtureModel& model, const SeparationCase& c, double eps_sep);

/// The base model of a config (file or hypercube means with unit variance).
MixtureModel base_model(const ExperimentConfig& cfg);

/// The model a trial samples from: the base model (or its per-trial redraw)
/// with the case variances applied.
MixtureModel trial_model(const ExperimentConfig& cfg, const SeparationCase& c, int trial);

/// Seed of trial `trial` at grid value `n`: derive_seed(seed, N index, trial).
std::uint64_t trial_seed(const ExperimentConfig& cfg, std::size_t n, int trial);

/// The labelled sample a trial draws (stream 0 of the trial seed).
LabeledDataset trial_dataset(const ExperimentConfig& cfg, const MixtureModel& model, std::size_t n,
                             int trial);

/// One trial of the protocol. `n` must be in the config's N grid. Everything
/// except the timing fields is a function of (cfg, n, case, trial).
TrialRecord run_trial(const ExperimentConfig& cfg, std::size_t n, const SeparationCase& c,
                      int trial);

/// Same, against an already prepared model (skips rebuilding it per trial).
TrialRecord run_trial(const ExperimentConfig& cfg, const MixtureModel& model, std::size_t n,
                      const SeparationCase& c, int trial);

struct OptRatio {
    double ratio_emp = 0.0;
    double ratio_bound = 0.0;
    bool premise_holds = false;
};

/// k-means distortion at K over that at K-1 against
/// F sigma_bar^2 / (lambda_min + (F-K+2) sigma_bar^2); the premise holds when
/// the empirical ratio is at most 1.05 times the bound.
OptRatio opt_ratio_check(const Matrix& v, int k, const MixtureModel& model,
                         const KMeansConfig& cfg = {});

struct CellSummary {
    std::string case_name;
    std::size_t n = 0;
    int trials = 0;
    double d_org = 0.0, dbar_org = 0.0, dbar_org_emp = 0.0;
    double d_pca = 0.0, dbar_pca = 0.0, dbar_pca_emp = 0.0;
    double t_full_ms = 0.0, t_reduce_ms = 0.0, t_reduced_kmeans_ms = 0.0;
};

struct SweepResult {
    std::vector<TrialRecord> records;  ///< sorted by (case, N, trial)
    std::vector<CellSummary> summary;
};

/// Runs every (case, N, trial) cell. Writes nothing.
SweepResult sweep(const ExperimentConfig& cfg);

// Output helpers (bench_output.cpp).

std::vector<std::string> csv_header(const ExperimentConfig& cfg);
std::string csv_row(const TrialRecord& r);
std::string to_csv(const ExperimentConfig& cfg, const std::vector<TrialRecord>& records);
nlohmann::json to_json(const TrialRecord& r);
nlohmann::json summary_json(const ExperimentConfig& cfg, const SweepResult& result);
/// Line charts of mean distances and runtimes against N, one per case.
std::string distance_svg(const SweepResult& result, const std::string& case_name);
std::string runtime_svg(const SweepResult& result, const std::string& case_name);
/// Formats with 17 significant digits; NaN for an empty optional.
std::string format_double(double x);

/// Writes trials.csv (or trials.json), summary.json and, with `plots`, SVG
/// charts into cfg.output. Throws IoError when the directory is unwritable.
void write_sweep(const ExperimentConfig& cfg, const SweepResult& result, bool as_json, bool plots);

}  // namespace mixclust
