#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mixclust/bench.hpp"
#include "mixclust/errors.hpp"
#include "mixclust/metrics_bounds.hpp"
#include "mixclust/rng.hpp"
#include "mixclust/tau_zeta.hpp"

using namespace mixclust;
using json = nlohmann::json;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.k = 2;
    cfg.f = 20;
    cfg.mean_seed = 4;
    cfg.n_grid = {200, 400};
    cfg.trials = 2;
    cfg.seed = 9;
    return cfg;
}

std::vector<std::string> split_lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    for (std::string f; std::getline(in, f, ',');) out.push_back(f);
    return out;
}

}  // namespace

TEST(CaseVariances, RatiosToLambdaMin) {
    const ExperimentConfig cfg = small_config();
    const MixtureModel base = base_model(cfg);
    const double lmin = population_moments(base).lambda_min;
    const double full = lmin * zeta(0.5, 2);
    const double well = set_case_variances(base, SeparationCase::well(), 1e-6).components()[0].spherical_variance();
    const double mod = set_case_variances(base, SeparationCase::moderate(), 1e-6).components()[0].spherical_variance();
    EXPECT_GE(well / full, 0.2496);
    EXPECT_LE(well / full, 0.25);
    EXPECT_GE(mod / full, 0.9985);
    EXPECT_LE(mod / full, 1.0);
    EXPECT_DOUBLE_EQ(set_case_variances(base, SeparationCase::moderate(), 0.0).components()[0].spherical_variance() / full, 1.0);
    EXPECT_DOUBLE_EQ(set_case_variances(base, SeparationCase::custom(2.0), 0.0).components()[0].spherical_variance() / full, 2.0);
}

TEST(CaseVariances, WellCaseDeltaIsAQuarterOfZeta) {
    const MixtureModel m = set_case_variances(base_model(small_config()), SeparationCase::well(), 1e-6);
    const BoundReport b = theorem_bound(Theorem::T1_Original, m);
    EXPECT_NEAR(*b.delta, zeta(0.5 - 1e-6, 2) / 4.0, 1e-12);
    EXPECT_TRUE(b.applicable());
}

TEST(CaseVariances, DegenerateModelRejected) {
    const MixtureModel same(Vector::Constant(2, 0.5), Matrix::Ones(3, 2),
                            {ComponentDistribution::spherical_gaussian(1.0),
                             ComponentDistribution::spherical_gaussian(1.0)});
    EXPECT_THROW(set_case_variances(same, SeparationCase::well(), 1e-6), ValidationError);
    EXPECT_NO_THROW(set_case_variances(same, SeparationCase::as_is(), 1e-6));
}

TEST(RunTrial, WellCaseRecoversClusters) {
    ExperimentConfig cfg;
    cfg.f = 100;
    cfg.n_grid = {1000};
    cfg.seed = 1;
    for (int t = 0; t < 3; ++t) {
        const TrialRecord r = run_trial(cfg, 1000, SeparationCase::well(), t);
        EXPECT_LE(r.d_org, 0.02);
        EXPECT_LE(r.d_pca, 0.02);
        ASSERT_TRUE(r.dbar_org && r.dbar_pca);
        EXPECT_TRUE(r.dbar_org_applicable);
        EXPECT_LE(*r.dbar_pca, *r.dbar_org);
        ASSERT_EQ(r.reducers.size(), 1u);
        EXPECT_EQ(r.reducers[0].me, r.d_pca);
    }
}

TEST(RunTrial, PcaBoundBelowOriginalWhenApplicable) {
    ExperimentConfig cfg = small_config();
    for (const SeparationCase& c : {SeparationCase::well(), SeparationCase::moderate()}) {
        const TrialRecord r = run_trial(cfg, 200, c, 0);
        if (r.dbar_org_applicable && r.dbar_pca_applicable) EXPECT_LE(*r.dbar_pca, *r.dbar_org);
    }
}

TEST(RunTrial, PointMassesGiveZero) {
    ExperimentConfig cfg = small_config();
    const MixtureModel m(Vector::Constant(2, 0.5), hypercube_means(20, 2, 3),
                         {ComponentDistribution::point_mass(), ComponentDistribution::point_mass()});
    const TrialRecord r = run_trial(cfg, m, 200, SeparationCase::as_is(), 0);
    EXPECT_EQ(r.d_org, 0.0);
    EXPECT_EQ(r.d_pca, 0.0);
    EXPECT_EQ(r.reducers[0].gamma, 1.0);
}

TEST(RunTrial, DeterministicApartFromTimings) {
    ExperimentConfig cfg = small_config();
    cfg.reducers = {ReducerSpec{}, ReducerSpec{ReductionMethod::Svd},
                    ReducerSpec{ReductionMethod::RandomProjection, 5},
                    ReducerSpec{ReductionMethod::RandomizedSvd, 0, 6}};
    auto strip = [](json j) {
        j.erase("t_full_ms");
        j.erase("t_reduce_ms");
        j.erase("t_reduced_kmeans_ms");
        return j;
    };
    const TrialRecord a = run_trial(cfg, 400, SeparationCase::moderate(), 1);
    const TrialRecord b = run_trial(cfg, 400, SeparationCase::moderate(), 1);
    EXPECT_EQ(strip(to_json(a)), strip(to_json(b)));
    EXPECT_NE(a.trial_seed, run_trial(cfg, 400, SeparationCase::moderate(), 0).trial_seed);
    EXPECT_THROW(run_trial(cfg, 300, SeparationCase::well(), 0), ValidationError);
}

TEST(OptRatio, RejectsKOne) {
    const MixtureModel m(Vector::Ones(1), Matrix::Zero(2, 1), {ComponentDistribution::spherical_gaussian(1.0)});
    EXPECT_THROW(opt_ratio_check(Matrix::Zero(2, 4), 1, m), ValidationError);
}

TEST(OptRatio, VanishingVariance) {
    ExperimentConfig cfg = small_config();
    const MixtureModel m = base_model(cfg).with_spherical_variance(1e-10);
    const OptRatio r = opt_ratio_check(sample(m, 300, 2).v, 2, m);
    EXPECT_LT(r.ratio_bound, 1e-8);
    EXPECT_LT(r.ratio_emp, 1e-8);
}

TEST(OptRatio, ThreePointsAgainstBruteForce) {
    Matrix v(1, 3);
    v << 0, 1, 5;
    const MixtureModel m(Vector::Constant(2, 0.5), (Matrix(1, 2) << 0.0, 5.0).finished(),
                         {ComponentDistribution::spherical_gaussian(0.1),
                          ComponentDistribution::spherical_gaussian(0.1)});
    const OptRatio r = opt_ratio_check(v, 2, m);
    const double expected = brute_force_optimal(v, 2).distortion / brute_force_optimal(v, 1).distortion;
    EXPECT_NEAR(r.ratio_emp, expected, 1e-12);
    EXPECT_NEAR(r.ratio_emp, 0.5 / 14.0, 1e-12);
    // F sigma^2 / (lambda_min + (F - K + 2) sigma^2) with lambda_min = 25/4.
    EXPECT_NEAR(r.ratio_bound, 0.1 / (6.25 + 0.1), 1e-12);
}

TEST(OptRatio, WellCasePremiseUsuallyHolds) {
    ExperimentConfig cfg;
    cfg.f = 100;
    cfg.n_grid = {5000};
    const MixtureModel m = set_case_variances(base_model(cfg), SeparationCase::well(), cfg.eps_sep);
    int holds = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        KMeansConfig kc;
        kc.seed = derive_seed(s, 1);
        if (opt_ratio_check(sample(m, 5000, derive_seed(s, 0)).v, 2, m, kc).premise_holds) ++holds;
    }
    EXPECT_GE(holds, 90);
}

TEST(Config, ParsesAndRoundTrips) {
    const json doc = json::parse(R"({
        "K": 3, "F": 10, "mean_seed": 2, "n_grid": [50, 100],
        "cases": ["well", {"custom": 0.5}],
        "kmeans": {"restarts": 3, "seeding": "uniform"},
        "reducers": ["pca", {"method": "randomized_svd", "sketch": 8},
                     {"method": "random_projection", "dim": 4}],
        "trials": 2, "seed": 5, "output": "x"})");
    const ExperimentConfig cfg = config_from_json(doc);
    EXPECT_EQ(cfg.k, 3);
    EXPECT_EQ(cfg.cases.size(), 2u);
    EXPECT_EQ(cfg.cases[1].name(), "custom_0.5");
    EXPECT_EQ(cfg.reducers[1].name(), "randomized_svd_s8");
    EXPECT_EQ(cfg.reducers[2].name(), "random_projection_d4");
    EXPECT_EQ(cfg.kmeans.seeding, Seeding::UniformRandom);
    EXPECT_EQ(config_to_json(config_from_json(config_to_json(cfg))), config_to_json(cfg));
}

TEST(Config, Rejections) {
    auto bad = [](const char* text) { return config_from_json(json::parse(text)); };
    EXPECT_THROW(bad(R"({"n_grid": []})"), ValidationError);
    EXPECT_THROW(bad(R"({"n_grid": [100, 50]})"), ValidationError);
    EXPECT_THROW(bad(R"({"n_grid": [100], "trials": 0})"), ValidationError);
    EXPECT_THROW(bad(R"({"n_grid": [100], "bogus": 1})"), ValidationError);
    EXPECT_THROW(bad(R"({"n_grid": [100], "cases": ["loose"]})"), ValidationError);
    EXPECT_THROW(bad(R"({"n_grid": [100], "reducers": ["random_projection"]})"), ValidationError);
    EXPECT_THROW(bad(R"({"n_grid": [100], "reducers": ["pca", "pca"]})"), ValidationError);
    EXPECT_THROW(bad(R"({"n_grid": [100], "model_file": "m.json", "K": 3})"), ValidationError);
    EXPECT_THROW(bad(R"({"n_grid": "many"})"), ValidationError);
    EXPECT_THROW(bad(R"([1, 2])"), ValidationError);
}

TEST(Config, MissingFileIsIoError) {
    EXPECT_THROW(load_config("/nonexistent/dir/config.json"), IoError);
}

TEST(Sweep, CsvShape) {
    ExperimentConfig cfg = small_config();
    cfg.n_grid = {200};
    cfg.reducers = {ReducerSpec{}, ReducerSpec{ReductionMethod::Svd}};
    const SweepResult res = sweep(cfg);
    ASSERT_EQ(res.records.size(), 2u);
    ASSERT_EQ(res.summary.size(), 1u);
    const auto lines = split_lines(to_csv(cfg, res.records));
    ASSERT_EQ(lines.size(), 3u);
    const auto header = split_fields(lines[0]);
    EXPECT_EQ(header, csv_header(cfg));
    EXPECT_EQ(header.front(), "N");
    EXPECT_NE(std::find(header.begin(), header.end(), "me_svd"), header.end());
    EXPECT_NE(std::find(header.begin(), header.end(), "gamma_pca"), header.end());
    for (std::size_t i = 1; i < lines.size(); ++i) EXPECT_EQ(split_fields(lines[i]).size(), header.size());
    EXPECT_NEAR(res.summary[0].d_org, (res.records[0].d_org + res.records[1].d_org) / 2.0, 1e-15);
}

TEST(Sweep, WritesFilesAndRejectsBadPath) {
    ExperimentConfig cfg = small_config();
    cfg.n_grid = {200};
    cfg.trials = 1;
    const SweepResult res = sweep(cfg);
    const std::filesystem::path dir = std::filesystem::temp_directory_path() / "mixclust_test_sweep";
    std::filesystem::remove_all(dir);
    cfg.output = dir;
    write_sweep(cfg, res, false, true);
    EXPECT_TRUE(std::filesystem::exists(dir / "trials.csv"));
    EXPECT_TRUE(std::filesystem::exists(dir / "summary.json"));
    EXPECT_TRUE(std::filesystem::exists(dir / "distances_well.svg"));
    EXPECT_TRUE(std::filesystem::exists(dir / "runtime_well.svg"));
    std::ifstream summary(dir / "summary.json");
    EXPECT_NO_THROW(json::parse(summary));
    std::filesystem::remove_all(dir);

    cfg.output = "/proc/mixclust_cannot_write_here";
    EXPECT_THROW(write_sweep(cfg, res, false, false), IoError);
}

TEST(FormatDouble, RoundTripsAndSpecials) {
    EXPECT_EQ(std::stod(format_double(0.1)), 0.1);
    EXPECT_EQ(format_double(std::nan("")), "nan");
    EXPECT_EQ(format_double(INFINITY), "inf");
}
