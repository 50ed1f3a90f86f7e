#include <gtest/gtest.h>

#include <cmath>

#include "mixclust/errors.hpp"
#include "mixclust/matrix_core.hpp"
#include "mixclust/mixture_models.hpp"
#include "mixclust/model_io.hpp"
#include "mixclust/tau_zeta.hpp"

using namespace mixclust;

namespace {

MixtureModel two_point_model(double var1 = 1.0, double var2 = 1.0) {
    Matrix means = Matrix::Zero(3, 2);
    means(0, 1) = 2.0;
    return MixtureModel(Vector::Constant(2, 0.5), means,
                        {ComponentDistribution::spherical_gaussian(var1),
                         ComponentDistribution::spherical_gaussian(var2)});
}

MixtureModel random_spherical(int k, Eigen::Index f, std::uint64_t seed, double var) {
    SplitMix64 rng(seed);
    Vector w(k);
    for (int j = 0; j < k; ++j) w(j) = 0.2 + rng.uniform();
    w /= w.sum();
    std::vector<ComponentDistribution> comps;
    for (int j = 0; j < k; ++j) comps.push_back(ComponentDistribution::spherical_gaussian(var * (0.5 + rng.uniform())));
    return MixtureModel(w, hypercube_means(f, k, seed), comps);
}

}  // namespace

TEST(MixtureModel, RejectsBadWeights) {
    Matrix means = Matrix::Zero(2, 2);
    std::vector<ComponentDistribution> c(2, ComponentDistribution::spherical_gaussian(1.0));
    Vector w(2);
    w << 0.6, 0.6;
    EXPECT_THROW(MixtureModel(w, means, c), ValidationError);
    w << 1.2, -0.2;
    EXPECT_THROW(MixtureModel(w, means, c), ValidationError);
    w << 0.5, 0.5 + 1e-11;
    EXPECT_THROW(MixtureModel(w, means, c), ValidationError);
    w << 0.5, 0.5 + 1e-13;
    EXPECT_NO_THROW(MixtureModel(w, means, c));
}

TEST(MixtureModel, RejectsDimensionMismatch) {
    Vector w = Vector::Constant(2, 0.5);
    std::vector<ComponentDistribution> c{ComponentDistribution::spherical_gaussian(1.0),
                                         ComponentDistribution::laplace(Vector::Ones(4))};
    EXPECT_THROW(MixtureModel(w, Matrix::Zero(3, 2), c), ValidationError);
    EXPECT_THROW(MixtureModel(w, Matrix::Zero(3, 3), {c[0], c[0]}), ValidationError);
}

TEST(ComponentDistribution, ParameterChecks) {
    EXPECT_THROW(ComponentDistribution::spherical_gaussian(-1.0), ValidationError);
    EXPECT_THROW(ComponentDistribution::laplace(Vector::Zero(3)), ValidationError);
    EXPECT_THROW(ComponentDistribution::uniform_box(-Vector::Ones(3)), ValidationError);
    EXPECT_THROW(ComponentDistribution::diagonal_gaussian(Vector()), ValidationError);
    const auto lap = ComponentDistribution::laplace(Vector::Constant(2, 0.5));
    EXPECT_NEAR(lap.coordinate_variances(2)(0), 0.5, 1e-15);  // 2 b^2
    const auto box = ComponentDistribution::uniform_box(Vector::Constant(2, 3.0));
    EXPECT_NEAR(box.coordinate_variances(2)(1), 3.0, 1e-15);  // h^2 / 3
    EXPECT_THROW(lap.spherical_variance(), ValidationError);
}

TEST(Sample, PointMassSingleComponent) {
    Matrix means(2, 1);
    means << 1.5, -4.0;
    const MixtureModel m(Vector::Ones(1), means, {ComponentDistribution::point_mass()});
    const LabeledDataset d = sample(m, 3, 42);
    for (int n = 0; n < 3; ++n) {
        EXPECT_EQ(d.v.col(n), means.col(0));
        EXPECT_EQ(d.target[n], 0);
    }
}

TEST(Sample, Deterministic) {
    const MixtureModel m = two_point_model();
    const LabeledDataset a = sample(m, 500, 9), b = sample(m, 500, 9), c = sample(m, 500, 10);
    EXPECT_EQ(a.v, b.v);
    EXPECT_EQ(a.target, b.target);
    EXPECT_NE(a.v, c.v);
}

TEST(Sample, PrefixStable) {
    // Column n depends only on (seed, n).
    const MixtureModel m = two_point_model();
    const LabeledDataset a = sample(m, 100, 4), b = sample(m, 40, 4);
    EXPECT_EQ(a.v.leftCols(40), b.v);
}

TEST(Sample, LabelFrequency) {
    const MixtureModel m = two_point_model();
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const LabeledDataset d = sample(m, 10000, seed);
        const double p = static_cast<double>(d.target.cluster_sizes()[0]) / 10000.0;
        EXPECT_GE(p, 0.47);
        EXPECT_LE(p, 0.53);
    }
}

TEST(Sample, WithinClusterVariance) {
    const MixtureModel m = two_point_model();
    const LabeledDataset d = sample(m, 10000, 77);
    for (int k = 0; k < 2; ++k) {
        std::vector<Eigen::Index> idx;
        for (std::size_t n = 0; n < d.target.size(); ++n)
            if (d.target[n] == k) idx.push_back(static_cast<Eigen::Index>(n));
        Matrix sub(3, static_cast<Eigen::Index>(idx.size()));
        for (std::size_t i = 0; i < idx.size(); ++i) sub.col(static_cast<Eigen::Index>(i)) = d.v.col(idx[i]);
        const Matrix z = center(sub).z;
        for (Eigen::Index r = 0; r < 3; ++r) {
            const double var = z.row(r).squaredNorm() / static_cast<double>(z.cols() - 1);
            EXPECT_GE(var, 0.94);
            EXPECT_LE(var, 1.06);
        }
    }
}

TEST(Sample, LogConcaveFamiliesHaveStatedVariance) {
    Matrix means = Matrix::Zero(2, 2);
    Vector scales(2), halves(2);
    scales << 0.5, 1.0;
    halves << 1.0, 3.0;
    const MixtureModel m(Vector::Constant(2, 0.5), means,
                         {ComponentDistribution::laplace(scales), ComponentDistribution::uniform_box(halves)});
    const LabeledDataset d = sample(m, 40000, 5);
    Vector s0 = Vector::Zero(2), s1 = Vector::Zero(2);
    double n0 = 0, n1 = 0;
    for (std::size_t n = 0; n < d.target.size(); ++n) {
        const Vector x = d.v.col(static_cast<Eigen::Index>(n));
        if (d.target[n] == 0) {
            s0 += x.cwiseAbs2();
            n0 += 1;
        } else {
            s1 += x.cwiseAbs2();
            n1 += 1;
            EXPECT_LE(std::abs(x(0)), 1.0);
            EXPECT_LE(std::abs(x(1)), 3.0);
        }
    }
    const Vector v0 = s0 / n0, v1 = s1 / n1;
    EXPECT_NEAR(v0(0), 0.5, 0.05);
    EXPECT_NEAR(v0(1), 2.0, 0.2);
    EXPECT_NEAR(v1(0), 1.0 / 3.0, 0.02);
    EXPECT_NEAR(v1(1), 3.0, 0.15);
}

TEST(PopulationMoments, TwoPointExample) {
    const PopulationMoments m = population_moments(two_point_model());
    Vector e1 = Vector::Zero(3);
    e1(0) = 1.0;
    EXPECT_LE((m.mean - e1).norm(), 1e-15);
    EXPECT_LE((m.sigma_bar0 - e1 * e1.transpose()).norm(), 1e-14);
    EXPECT_NEAR(m.lambda_min, 1.0, 1e-14);
    EXPECT_NEAR(m.lambda_min, 0.5 * 0.5 * 4.0, 1e-14);  // w1 w2 |u1 - u2|^2
    ASSERT_TRUE(m.sigma2_bar.has_value());
    EXPECT_DOUBLE_EQ(*m.sigma2_bar, 1.0);
}

TEST(PopulationMoments, EqualMeansGiveZeroLambda) {
    const MixtureModel m(Vector::Constant(2, 0.5), Matrix::Constant(3, 2, 0.7),
                         {ComponentDistribution::spherical_gaussian(1.0), ComponentDistribution::spherical_gaussian(1.0)});
    EXPECT_EQ(population_moments(m).lambda_min, 0.0);
}

TEST(PopulationMoments, WeightedVariance) {
    const PopulationMoments m = population_moments(two_point_model(1.0, 3.0));
    EXPECT_DOUBLE_EQ(*m.sigma2_bar, 2.0);
    EXPECT_DOUBLE_EQ(m.sigma2_max, 2.0);
    EXPECT_DOUBLE_EQ(m.sigma2_min, 2.0);
}

TEST(PopulationMoments, Identities) {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const MixtureModel model = random_spherical(2 + static_cast<int>(s % 3), 6, s, 0.3);
        const PopulationMoments m = population_moments(model);
        EXPECT_LE((m.sigma_bar0 - (m.sigma0 - m.mean * m.mean.transpose())).norm(), 1e-10);
        double comp_trace = 0.0;
        for (int k = 0; k < model.k(); ++k)
            comp_trace += model.weights()(k) * model.components()[static_cast<std::size_t>(k)].coordinate_variances(6).sum();
        EXPECT_NEAR(m.sigma_bar.trace(), m.sigma_bar0.trace() + comp_trace, 1e-10 * m.sigma_bar.trace());
        EXPECT_GE(m.lambda_min, 0.0);
        EXPECT_LE(m.sigma2_min, m.sigma2_max);
        // lambda_{K-1}(centred mean scatter) >= lambda_K(uncentred mean scatter).
        ASSERT_TRUE(check_non_degeneracy(model).holds);
        EXPECT_GT(m.lambda_min, 0.0);
        EXPECT_GE(m.lambda_min, sym_eigenvalues(m.sigma0)(model.k() - 1) - 1e-12);
    }
}

TEST(PopulationMoments, LaplaceAnisotropic) {
    Vector scales(3);
    scales << 0.5, 1.0, 2.0;  // variances 0.5, 2, 8
    Matrix means = Matrix::Zero(3, 2);
    means(1, 1) = 1.0;
    const MixtureModel m(Vector::Constant(2, 0.5), means,
                         {ComponentDistribution::laplace(scales), ComponentDistribution::spherical_gaussian(1.0)});
    const PopulationMoments pm = population_moments(m);
    EXPECT_FALSE(pm.sigma2_bar.has_value());
    EXPECT_DOUBLE_EQ(pm.sigma2_max, 0.5 * 8.0 + 0.5 * 1.0);
    EXPECT_DOUBLE_EQ(pm.sigma2_min, 0.5 * 0.5 + 0.5 * 1.0);
    EXPECT_NEAR(pm.l_bar, 0.5 * 10.5 + 0.5 * (1.0 + 3.0), 1e-14);
}

TEST(Separability, TwoPointModel) {
    const SeparabilityReport r = separability_report(two_point_model());
    ASSERT_TRUE(r.delta0.value.has_value());
    EXPECT_DOUBLE_EQ(*r.delta0.value, 1.0);
    EXPECT_DOUBLE_EQ(r.zeta_wmin, 0.5);
    EXPECT_FALSE(r.delta0.holds);
    EXPECT_DOUBLE_EQ(*r.delta1.value, 0.5);
    EXPECT_FALSE(r.delta1.holds);  // strict inequality
}

TEST(Separability, SmallVarianceHolds) {
    const SeparabilityReport r = separability_report(two_point_model().with_spherical_variance(1e-9));
    EXPECT_NEAR(*r.delta0.value, 0.0, 1e-8);
    EXPECT_TRUE(r.delta0.holds);
    EXPECT_TRUE(r.delta1.holds);
}

TEST(Separability, SphericalDelta2EqualsDelta0) {
    for (std::uint64_t s = 0; s < 10; ++s) {
        const MixtureModel m = random_spherical(3, 8, s, 0.01).with_spherical_variance(0.01);
        const SeparabilityReport r = separability_report(m);
        ASSERT_TRUE(r.delta0.value && r.delta2.value);
        EXPECT_NEAR(*r.delta2.value, *r.delta0.value, 1e-10 * *r.delta0.value);
        EXPECT_EQ(r.delta2.holds, r.delta0.holds);
    }
}

TEST(Separability, Delta3FormulaAndFlags) {
    const MixtureModel m = two_point_model().with_spherical_variance(1e-4);
    const SeparabilityReport r = separability_report(m);
    const double root = std::sqrt(2.0 * 1.0 * 1e-4 / 1.0);
    const double lbar = 0.5 * (0.0 + 3e-4) + 0.5 * (4.0 + 3e-4);
    EXPECT_NEAR(*r.a, 3.0 * lbar * root, 1e-12);
    EXPECT_NEAR(*r.b, (lbar - 1.0) * root, 1e-12);
    ASSERT_TRUE(r.delta3.value.has_value());
    EXPECT_NEAR(*r.delta3.value, (1e-4 + *r.a) / (1.0 + 1e-4 - *r.b), 1e-12);
    EXPECT_EQ(r.delta3.holds, *r.delta3.value < r.zeta_wmin);
}

TEST(Separability, DegenerateLeavesAllUndefined) {
    const MixtureModel m(Vector::Constant(2, 0.5), Matrix::Zero(3, 2),
                         {ComponentDistribution::spherical_gaussian(1.0), ComponentDistribution::spherical_gaussian(1.0)});
    const SeparabilityReport r = separability_report(m);
    for (const auto* idx : {&r.delta0, &r.delta1, &r.delta2, &r.delta3}) {
        EXPECT_FALSE(idx->value.has_value());
        EXPECT_FALSE(idx->holds);
        EXPECT_EQ(idx->reason, "non-degenerate condition fails");
    }
}

TEST(Separability, NonSphericalSkipsDelta0) {
    Matrix means = Matrix::Zero(2, 2);
    means(0, 1) = 3.0;
    const MixtureModel m(Vector::Constant(2, 0.5), means,
                         {ComponentDistribution::laplace(Vector::Constant(2, 0.1)),
                          ComponentDistribution::laplace(Vector::Constant(2, 0.1))});
    const SeparabilityReport r = separability_report(m);
    EXPECT_FALSE(r.delta0.value.has_value());
    EXPECT_EQ(r.delta0.reason, "requires spherical components");
    ASSERT_TRUE(r.delta2.value.has_value());
    // Isotropic: delta2 = (K-1) sigma^2 / lambda_min with sigma^2 = 2 b^2.
    EXPECT_NEAR(*r.delta2.value, 0.02 / 2.25, 1e-12);
}

TEST(Separability, ZetaBounds) {
    for (int k : {2, 3, 5}) {
        double prev = -1.0;
        for (int i = 0; i <= 1000; ++i) {
            const double p = (k - 1) / 2.0 * i / 1000.0;
            const double z = zeta(p, k);
            EXPECT_LE(0.5 * p, z + 1e-15);
            EXPECT_LE(z, p + 1e-15);
            if (i > 0) EXPECT_GT(z, prev);
            prev = z;
        }
    }
}

TEST(NonDegeneracy, Cases) {
    EXPECT_TRUE(check_non_degeneracy(random_spherical(2, 3, 1, 1.0)).holds);
    const MixtureModel same(Vector::Constant(2, 0.5), Matrix::Constant(3, 2, 1.0),
                            {ComponentDistribution::point_mass(), ComponentDistribution::point_mass()});
    EXPECT_FALSE(check_non_degeneracy(same).holds);
    Matrix means(4, 3);
    means.col(0) << 1, 0, 2, 0;
    means.col(1) << 0, 1, 0, 3;
    means.col(2) = 0.5 * (means.col(0) + means.col(1));
    const MixtureModel mid(Vector::Constant(3, 1.0 / 3), means,
                           std::vector<ComponentDistribution>(3, ComponentDistribution::spherical_gaussian(1.0)));
    const NonDegeneracy nd = check_non_degeneracy(mid);
    EXPECT_FALSE(nd.holds);
    EXPECT_EQ(nd.rank, 2);
    Vector w(2);
    w << 1.0, 0.0;
    const MixtureModel zero_w(w, hypercube_means(3, 2, 4),
                              {ComponentDistribution::point_mass(), ComponentDistribution::point_mass()});
    EXPECT_FALSE(check_non_degeneracy(zero_w).holds);
}

TEST(NonDegeneracy, CollinearTwoMeansStillSeparated) {
    // Rank 1 means, yet the centred scatter has lambda_min = 1.
    const MixtureModel m = two_point_model();
    EXPECT_FALSE(check_non_degeneracy(m).holds);
    EXPECT_NEAR(population_moments(m).lambda_min, 1.0, 1e-14);
}

TEST(SampleCovariance, ConvergesWithN) {
    int better = 0;
    for (std::uint64_t t = 0; t < 100; ++t) {
        const MixtureModel m = random_spherical(3, 5, 500 + t, 0.2);
        const Matrix target = population_moments(m).sigma_bar;
        auto err = [&](std::size_t n) {
            const Matrix z = center(sample(m, n, derive_seed(t, n)).v).z;
            return spectral_norm_symmetric(z * z.transpose() / static_cast<double>(n) - target);
        };
        if (err(50000) < err(500)) ++better;
    }
    EXPECT_GE(better, 95);
}

TEST(ModelIo, RoundTripAndSchema) {
    const nlohmann::json doc = nlohmann::json::parse(R"({
        "K": 2, "F": 3, "weights": [0.25, 0.75],
        "means": [[0, 0, 0], [1, 2, 3]],
        "components": [
            {"family": "spherical_gaussian", "params": {"variance": 0.5}},
            {"family": "laplace", "params": {"scales": [0.1, 0.2, 0.3]}}
        ]})");
    const MixtureModel m = model_from_json(doc);
    EXPECT_EQ(m.k(), 2);
    EXPECT_EQ(m.dim(), 3);
    EXPECT_EQ(m.components()[1].family(), Family::Laplace);
    const MixtureModel back = model_from_json(model_to_json(m));
    EXPECT_EQ(back.means(), m.means());
    EXPECT_EQ(back.weights(), m.weights());
    EXPECT_EQ(back.components()[1].params(), m.components()[1].params());
}

TEST(ModelIo, HypercubeMeansAndSharedComponent) {
    const nlohmann::json doc = nlohmann::json::parse(R"({
        "K": 3, "F": 50, "weights": [0.2, 0.3, 0.5],
        "means": {"hypercube_uniform": {"seed": 7}},
        "components": {"family": "uniform_box", "params": {"half_width": 0.4}}})");
    const MixtureModel m = model_from_json(doc);
    EXPECT_EQ(m.means(), hypercube_means(50, 3, 7));
    EXPECT_GE(m.means().minCoeff(), 0.0);
    EXPECT_LE(m.means().maxCoeff(), 1.0);
    EXPECT_EQ(m.components()[2].family(), Family::UniformBox);
}

TEST(ModelIo, Rejections) {
    for (const char* bad : {
             R"({"K": 2, "F": 2, "weights": [0.5, 0.6], "means": [[0,0],[1,1]], "components": {"family": "point_mass"}})",
             R"({"K": 2, "F": 2, "weights": [0.5, 0.5], "means": [[0,0]], "components": {"family": "point_mass"}})",
             R"({"K": 2, "F": 2, "weights": [0.5, 0.5], "means": [[0,0],[1,1]], "components": {"family": "cauchy"}})",
             R"({"K": 2, "weights": [0.5, 0.5], "means": [[0,0],[1,1]], "components": {"family": "point_mass"}})",
             R"({"K": "two"})"}) {
        EXPECT_THROW(model_from_json(nlohmann::json::parse(bad)), ValidationError) << bad;
    }
    EXPECT_THROW(load_model("/nonexistent/model.json"), IoError);
}
