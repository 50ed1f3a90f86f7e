#include "mixclust/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "mixclust/errors.hpp"
#include "mixclust/metrics_bounds.hpp"
#include "mixclust/model_io.hpp"
#include "mixclust/rng.hpp"
#include "mixclust/tau_zeta.hpp"

namespace mixclust {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

SeparationCase case_from_json(const json& j) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "well") return SeparationCase::well();
        if (s == "moderate") return SeparationCase::moderate();
        if (s == "as_is") return SeparationCase::as_is();
        throw ValidationError("unknown separation case '" + s + "'");
    }
    if (j.is_object() && j.size() == 1 && j.contains("custom")) {
        const double m = j.at("custom").get<double>();
        if (!(m > 0.0) || !std::isfinite(m)) {
            throw ValidationError("custom multiplier must be positive");
        }
        return SeparationCase::custom(m);
    }
    throw ValidationError("a case is \"well\", \"moderate\", \"as_is\" or {\"custom\": m}");
}

json case_to_json(const SeparationCase& c) {
    if (c.kind == SeparationCase::Kind::Custom) return json{{"custom", c.multiplier}};
    return c.name();
}

ReductionMethod method_from_string(const std::string& s) {
    for (ReductionMethod m : {ReductionMethod::Pca, ReductionMethod::Svd,
                              ReductionMethod::RandomProjection, ReductionMethod::RandomizedSvd}) {
        if (s == method_name(m)) return m;
    }
    throw ValidationError("unknown reducer '" + s + "'");
}

ReducerSpec reducer_from_json(const json& j) {
    ReducerSpec r;
    if (j.is_string()) {
        r.method = method_from_string(j.get<std::string>());
    } else if (j.is_object()) {
        for (const auto& [key, val] : j.items()) {
            if (key == "method") r.method = method_from_string(val.get<std::string>());
            else if (key == "dim") r.dim = val.get<Eigen::Index>();
            else if (key == "sketch") r.sketch = val.get<Eigen::Index>();
            else throw ValidationError("unknown reducer key '" + key + "'");
        }
        if (!j.contains("method")) throw ValidationError("reducer object needs \"method\"");
    } else {
        throw ValidationError("a reducer is a name or an object");
    }
    if (r.dim < 0 || r.sketch < 0) throw ValidationError("reducer dimensions must be non-negative");
    if (r.method == ReductionMethod::RandomProjection && r.dim == 0) {
        throw ValidationError("random_projection needs an explicit \"dim\"");
    }
    if (r.sketch != 0 && r.method != ReductionMethod::RandomizedSvd) {
        throw ValidationError("\"sketch\" only applies to randomized_svd");
    }
    return r;
}

json reducer_to_json(const ReducerSpec& r) {
    json j{{"method", method_name(r.method)}};
    if (r.dim != 0) j["dim"] = r.dim;
    if (r.sketch != 0) j["sketch"] = r.sketch;
    return j;
}

std::size_t n_index(const ExperimentConfig& cfg, std::size_t n) {
    const auto it = std::find(cfg.n_grid.begin(), cfg.n_grid.end(), n);
    if (it == cfg.n_grid.end()) throw ValidationError("N is not in the config's N grid");
    return static_cast<std::size_t>(it - cfg.n_grid.begin());
}

ReducedDataset apply_reducer(const ReducerSpec& r, const Matrix& v, int k, std::uint64_t seed) {
    const Eigen::Index kk = k;
    switch (r.method) {
        case ReductionMethod::Pca: return pca_reduce(v, r.dim == 0 ? kk - 1 : r.dim);
        case ReductionMethod::Svd: return svd_reduce(v, r.dim == 0 ? kk : r.dim);
        case ReductionMethod::RandomProjection: return random_projection(v, r.dim, seed);
        case ReductionMethod::RandomizedSvd:
            return randomized_svd(v, r.dim == 0 ? kk : r.dim, r.sketch == 0 ? kk + 10 : r.sketch,
                                  seed);
    }
    throw ValidationError("unknown reducer");
}

double mean_of(const std::vector<double>& xs) {
    if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

}  // namespace

std::string SeparationCase::name() const {
    switch (kind) {
        case Kind::Well: return "well";
        case Kind::Moderate: return "moderate";
        case Kind::AsIs: return "as_is";
        case Kind::Custom: {
            char buf[64];
            std::snprintf(buf, sizeof buf, "custom_%g", multiplier);
            return buf;
        }
    }
    return "unknown";
}

std::string ReducerSpec::name() const {
    std::string s = method_name(method);
    if (dim != 0) s += "_d" + std::to_string(dim);
    if (sketch != 0) s += "_s" + std::to_string(sketch);
    return s;
}

void ExperimentConfig::validate() const {
    if (n_grid.empty()) throw ValidationError("N grid is empty");
    for (std::size_t i = 1; i < n_grid.size(); ++i) {
        if (n_grid[i] <= n_grid[i - 1]) throw ValidationError("N grid must be strictly increasing");
    }
    if (n_grid.front() < 2) throw ValidationError("every N must be at least 2");
    if (trials < 1) throw ValidationError("trials must be at least 1");
    if (cases.empty()) throw ValidationError("no separation cases");
    if (!(eps_sep >= 0.0)) throw ValidationError("eps_sep must be non-negative");
    if (kmeans.restarts < 1 || kmeans.max_iter < 1) {
        throw ValidationError("k-means restarts and max_iter must be positive");
    }
    if (!model_file) {
        if (k < 2) throw ValidationError("K must be at least 2");
        if (f < 1) throw ValidationError("F must be at least 1");
        if (!weights.empty() && weights.size() != static_cast<std::size_t>(k)) {
            throw ValidationError("weights must have K entries");
        }
    } else if (redraw_means_per_trial) {
        throw ValidationError("redraw_means_per_trial needs hypercube means, not a model file");
    }
    std::set<std::string> names;
    for (const auto& r : reducers) {
        if (!names.insert(r.name()).second) throw ValidationError("duplicate reducer " + r.name());
    }
}

ExperimentConfig config_from_json(const json& doc) {
    if (!doc.is_object()) throw ValidationError("experiment config must be a JSON object");
    ExperimentConfig cfg;
    try {
        for (const auto& [key, val] : doc.items()) {
            if (key == "model_file") cfg.model_file = val.get<std::string>();
            else if (key == "mean_seed") cfg.mean_seed = val.get<std::uint64_t>();
            else if (key == "K") cfg.k = val.get<int>();
            else if (key == "F") cfg.f = val.get<Eigen::Index>();
            else if (key == "weights") cfg.weights = val.get<std::vector<double>>();
            else if (key == "n_grid") cfg.n_grid = val.get<std::vector<std::size_t>>();
            else if (key == "cases") {
                cfg.cases.clear();
                for (const auto& c : val) cfg.cases.push_back(case_from_json(c));
            } else if (key == "eps_sep") cfg.eps_sep = val.get<double>();
            else if (key == "kmeans") {
                for (const auto& [kk, kv] : val.items()) {
                    if (kk == "restarts") cfg.kmeans.restarts = kv.get<int>();
                    else if (kk == "max_iter") cfg.kmeans.max_iter = kv.get<int>();
                    else if (kk == "rel_tol") cfg.kmeans.rel_tol = kv.get<double>();
                    else if (kk == "seeding") {
                        const std::string s = kv.get<std::string>();
                        if (s == "kmeans++") cfg.kmeans.seeding = Seeding::KMeansPlusPlus;
                        else if (s == "uniform") cfg.kmeans.seeding = Seeding::UniformRandom;
                        else throw ValidationError("seeding is \"kmeans++\" or \"uniform\"");
                    } else throw ValidationError("unknown kmeans key '" + kk + "'");
                }
            } else if (key == "reducers") {
                cfg.reducers.clear();
                for (const auto& r : val) cfg.reducers.push_back(reducer_from_json(r));
            } else if (key == "trials") cfg.trials = val.get<int>();
            else if (key == "seed") cfg.seed = val.get<std::uint64_t>();
            else if (key == "output") cfg.output = val.get<std::string>();
            else if (key == "redraw_means_per_trial") cfg.redraw_means_per_trial = val.get<bool>();
            else throw ValidationError("unknown config key '" + key + "'");
        }
        if (cfg.model_file) {
            for (const char* k : {"K", "F", "weights", "mean_seed"}) {
                if (doc.contains(k)) {
                    throw ValidationError(std::string("\"") + k +
                                          "\" comes from the model file; do not set it");
                }
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("experiment config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    ExperimentConfig cfg = config_from_json(read_json_file(path));
    if (cfg.model_file && cfg.model_file->is_relative()) {
        cfg.model_file = path.parent_path() / *cfg.model_file;
    }
    return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
    json j;
    if (cfg.model_file) {
        j["model_file"] = cfg.model_file->string();
    } else {
        j["K"] = cfg.k;
        j["F"] = cfg.f;
        j["mean_seed"] = cfg.mean_seed;
        if (!cfg.weights.empty()) j["weights"] = cfg.weights;
    }
    j["n_grid"] = cfg.n_grid;
    j["cases"] = json::array();
    for (const auto& c : cfg.cases) j["cases"].push_back(case_to_json(c));
    j["eps_sep"] = cfg.eps_sep;
    j["kmeans"] = {{"restarts", cfg.kmeans.restarts},
                   {"max_iter", cfg.kmeans.max_iter},
                   {"rel_tol", cfg.kmeans.rel_tol},
                   {"seeding", cfg.kmeans.seeding == Seeding::KMeansPlusPlus ? "kmeans++" : "uniform"}};
    j["reducers"] = json::array();
    for (const auto& r : cfg.reducers) j["reducers"].push_back(reducer_to_json(r));
    j["trials"] = cfg.trials;
    j["seed"] = cfg.seed;
    j["redraw_means_per_trial"] = cfg.redraw_means_per_trial;
    j["output"] = cfg.output.string();
    return j;
}

MixtureModel set_case_variances(const MixtureModel& model, const SeparationCase& c, double eps_sep) {
    if (c.kind == SeparationCase::Kind::AsIs) return model;
    if (model.k() < 2) throw ValidationError("separation cases need K >= 2");
    const PopulationMoments m = population_moments(model);
    if (!(m.lambda_min > 0.0)) {
        throw ValidationError("set_case_variances: lambda_min is zero (degenerate means)");
    }
    const int k = model.k();
    const double z = zeta(model.w_min() - eps_sep, k);
    const double sigma2 = c.multiplier * m.lambda_min * z / static_cast<double>(k - 1);
    return model.with_spherical_variance(sigma2);
}

MixtureModel base_model(const ExperimentConfig& cfg) {
    if (cfg.model_file) return load_model(*cfg.model_file);
    Vector w(cfg.k);
    if (cfg.weights.empty()) {
        w.setConstant(1.0 / cfg.k);
    } else {
        for (int i = 0; i < cfg.k; ++i) w(i) = cfg.weights[static_cast<std::size_t>(i)];
    }
    std::vector<ComponentDistribution> comps(static_cast<std::size_t>(cfg.k),
                                             ComponentDistribution::spherical_gaussian(1.0));
    return MixtureModel(w, hypercube_means(cfg.f, cfg.k, cfg.mean_seed), std::move(comps));
}

std::uint64_t trial_seed(const ExperimentConfig& cfg, std::size_t n, int trial) {
    return derive_seed(cfg.seed, n_index(cfg, n), static_cast<std::uint64_t>(trial));
}

LabeledDataset trial_dataset(const ExperimentConfig& cfg, const MixtureModel& model, std::size_t n,
                             int trial) {
    return sample(model, n, derive_seed(trial_seed(cfg, n, trial), 0));
}

MixtureModel trial_model(const ExperimentConfig& cfg, const SeparationCase& c, int trial) {
    if (!cfg.redraw_means_per_trial) return set_case_variances(base_model(cfg), c, cfg.eps_sep);
    ExperimentConfig per_trial = cfg;
    per_trial.mean_seed = derive_seed(cfg.mean_seed, static_cast<std::uint64_t>(trial));
    return set_case_variances(base_model(per_trial), c, cfg.eps_sep);
}

TrialRecord run_trial(const ExperimentConfig& cfg, std::size_t n, const SeparationCase& c,
                      int trial) {
    return run_trial(cfg, trial_model(cfg, c, trial), n, c, trial);
}

TrialRecord run_trial(const ExperimentConfig& cfg, const MixtureModel& model, std::size_t n,
                      const SeparationCase& c, int trial) {
    const int k = model.k();
    if (k < 2) throw ValidationError("run_trial needs K >= 2");
    if (n < static_cast<std::size_t>(k)) throw ValidationError("run_trial needs N >= K");

    TrialRecord rec;
    rec.n = n;
    rec.f = model.dim();
    rec.k = k;
    rec.case_name = c.name();
    rec.trial_seed = trial_seed(cfg, n, trial);

    const LabeledDataset data = trial_dataset(cfg, model, n, trial);

    KMeansConfig kc = cfg.kmeans;
    kc.seed = derive_seed(rec.trial_seed, 1);
    auto start = Clock::now();
    const KMeansResult full = kmeans(data.v, k, kc);
    rec.t_full_ms = elapsed_ms(start);
    rec.d_org = me_distance(data.target, full.clustering);

    start = Clock::now();
    const ReducedDataset pca = pca_reduce(data.v, k - 1);
    rec.t_reduce_ms = elapsed_ms(start);
    kc.seed = derive_seed(rec.trial_seed, 2);
    start = Clock::now();
    const KMeansResult reduced = kmeans(pca.v_tilde, k, kc);
    rec.t_reduced_kmeans_ms = elapsed_ms(start);
    rec.d_pca = me_distance(data.target, reduced.clustering);

    const bool spherical = model.is_spherical();
    const Theorem org = spherical ? Theorem::T1_Original : Theorem::T4_LogConcaveOriginal;
    const Theorem red = spherical ? Theorem::T2_Pca : Theorem::T5_LogConcavePca;
    const BoundReport b_org = theorem_bound(org, model);
    const BoundReport b_pca = theorem_bound(red, model);
    const BoundReport e_org = theorem_bound(org, data.v, data.target);
    const BoundReport e_pca = theorem_bound(red, data.v, data.target);
    rec.dbar_org = b_org.value;
    rec.dbar_pca = b_pca.value;
    rec.dbar_org_emp = e_org.value;
    rec.dbar_pca_emp = e_pca.value;
    rec.dbar_org_applicable = b_org.applicable();
    rec.dbar_pca_applicable = b_pca.applicable();
    rec.dbar_org_emp_applicable = e_org.applicable();
    rec.dbar_pca_emp_applicable = e_pca.applicable();

    for (std::size_t i = 0; i < cfg.reducers.size(); ++i) {
        const ReducerSpec& spec = cfg.reducers[i];
        ReducerOutcome out;
        out.name = spec.name();
        const std::uint64_t rs = derive_seed(rec.trial_seed, 10 + i);
        Clustering labels;
        if (spec.method == ReductionMethod::Pca && (spec.dim == 0 || spec.dim == k - 1)) {
            labels = reduced.clustering;
        } else {
            const ReducedDataset rd = apply_reducer(spec, data.v, k, derive_seed(rs, 0));
            KMeansConfig rc = cfg.kmeans;
            rc.seed = derive_seed(rs, 1);
            labels = kmeans(rd.v_tilde, k, rc).clustering;
        }
        out.me = me_distance(data.target, labels);
        out.gamma = gamma_factor(data.v, labels, full.clustering);
        rec.reducers.push_back(std::move(out));
    }
    return rec;
}

OptRatio opt_ratio_check(const Matrix& v, int k, const MixtureModel& model, const KMeansConfig& cfg) {
    if (k < 2) throw ValidationError("opt_ratio_check needs K >= 2");
    if (!model.is_spherical()) throw ValidationError("opt_ratio_check needs a spherical model");
    if (model.k() != k) throw ValidationError("opt_ratio_check: K differs from the model's");
    const PopulationMoments m = population_moments(model);
    const double s2 = *m.sigma2_bar;
    const double f = static_cast<double>(model.dim());
    OptRatio r;
    const double den_bound = m.lambda_min + (f - k + 2) * s2;
    r.ratio_bound = den_bound > 0.0 ? f * s2 / den_bound : 0.0;
    const double num = kmeans(v, k, cfg).distortion;
    const double den = kmeans(v, k - 1, cfg).distortion;
    r.ratio_emp = den > 0.0 ? num / den : 0.0;
    r.premise_holds = r.ratio_emp <= 1.05 * r.ratio_bound;
    return r;
}

SweepResult sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    const MixtureModel base = base_model(cfg);
    SweepResult res;
    for (const SeparationCase& c : cfg.cases) {
        const MixtureModel fixed = set_case_variances(base, c, cfg.eps_sep);
        for (std::size_t n : cfg.n_grid) {
            CellSummary cell;
            cell.case_name = c.name();
            cell.n = n;
            cell.trials = cfg.trials;
            std::map<std::string, std::vector<double>> cols;
            for (int t = 0; t < cfg.trials; ++t) {
                TrialRecord r = cfg.redraw_means_per_trial
                                    ? run_trial(cfg, trial_model(cfg, c, t), n, c, t)
                                    : run_trial(cfg, fixed, n, c, t);
                cols["d_org"].push_back(r.d_org);
                cols["d_pca"].push_back(r.d_pca);
                if (r.dbar_org) cols["dbar_org"].push_back(*r.dbar_org);
                if (r.dbar_org_emp) cols["dbar_org_emp"].push_back(*r.dbar_org_emp);
                if (r.dbar_pca) cols["dbar_pca"].push_back(*r.dbar_pca);
                if (r.dbar_pca_emp) cols["dbar_pca_emp"].push_back(*r.dbar_pca_emp);
                cols["t_full_ms"].push_back(r.t_full_ms);
                cols["t_reduce_ms"].push_back(r.t_reduce_ms);
                cols["t_reduced_kmeans_ms"].push_back(r.t_reduced_kmeans_ms);
                res.records.push_back(std::move(r));
            }
            cell.d_org = mean_of(cols["d_org"]);
            cell.dbar_org = mean_of(cols["dbar_org"]);
            cell.dbar_org_emp = mean_of(cols["dbar_org_emp"]);
            cell.d_pca = mean_of(cols["d_pca"]);
            cell.dbar_pca = mean_of(cols["dbar_pca"]);
            cell.dbar_pca_emp = mean_of(cols["dbar_pca_emp"]);
            cell.t_full_ms = mean_of(cols["t_full_ms"]);
            cell.t_reduce_ms = mean_of(cols["t_reduce_ms"]);
            cell.t_reduced_kmeans_ms = mean_of(cols["t_reduced_kmeans_ms"]);
            res.summary.push_back(cell);
        }
    }
    return res;
}

}  // namespace mixclust
