#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mixclust/clustering.hpp"
#include "mixclust/matrix_core.hpp"
#include "mixclust/rng.hpp"

namespace mixclust {

enum class Family { SphericalGaussian, DiagonalGaussian, Laplace, UniformBox };

const char* family_name(Family f) noexcept;

/// One log-concave mixture component, centred at the origin; the mixture adds
/// the component mean when sampling. All supported families have diagonal
/// covariance.
class ComponentDistribution {
public:
    /// sigma^2 I. A zero variance is the point mass used by degenerate tests.
    static ComponentDistribution spherical_gaussian(double variance);
    static ComponentDistribution point_mass() { return spherical_gaussian(0.0); }
    static ComponentDistribution diagonal_gaussian(Vector variances);
    /// Independent Laplace coordinates, density exp(-|x|/b) / (2b).
    static ComponentDistribution laplace(Vector scales);
    /// Independent uniform coordinates on [-h, h].
    static ComponentDistribution uniform_box(Vector half_widths);

    Family family() const noexcept { return family_; }
    bool is_spherical() const noexcept { return family_ == Family::SphericalGaussian; }
    /// sigma^2 of a spherical component. Throws ValidationError otherwise.
    double spherical_variance() const;
    /// Per-family parameter vector (empty for spherical).
    const Vector& params() const noexcept { return params_; }

    /// Diagonal of the covariance in dimension `dim`.
    Vector coordinate_variances(Eigen::Index dim) const;

    /// Draws one centred sample into `out` (length = ambient dimension).
    void draw(SplitMix64& rng, Eigen::Ref<Vector> out) const;

private:
    ComponentDistribution(Family family, double variance, Vector params);

    Family family_;
    double variance_ = 0.0;
    Vector params_;
};

/// Weights, means (F x K, one column per component), and components.
class MixtureModel {
public:
    /// Throws ValidationError unless weights are non-negative and sum to one
    /// within 1e-12, every mean has dimension F, and every component's
    /// parameter vector has length F.
    MixtureModel(Vector weights, Matrix means, std::vector<ComponentDistribution> components);

    int k() const noexcept { return static_cast<int>(weights_.size()); }
    Eigen::Index dim() const noexcept { return means_.rows(); }
    const Vector& weights() const noexcept { return weights_; }
    const Matrix& means() const noexcept { return means_; }
    const std::vector<ComponentDistribution>& components() const noexcept { return components_; }

    double w_min() const { return weights_.minCoeff(); }
    double w_max() const { return weights_.maxCoeff(); }
    bool is_spherical() const;

    /// Copy with every component replaced by N(0, sigma2 I).
    MixtureModel with_spherical_variance(double sigma2) const;

private:
    Vector weights_;
    Matrix means_;
    std::vector<ComponentDistribution> components_;
};

/// F x K matrix with entries drawn uniformly from [0, 1].
Matrix hypercube_means(Eigen::Index dim, int k, std::uint64_t seed);

/// Samples plus the correct target clustering.
struct LabeledDataset {
    Matrix v;                 ///< F x N, columns are samples
    Clustering target;        ///< component that generated each sample
    std::string model_id;
};

/// Draws N labelled samples. Column n uses the stream derive_seed(seed, n), so
/// output is bit-identical for identical (model, N, seed).
LabeledDataset sample(const MixtureModel& model, std::size_t n, std::uint64_t seed,
                      std::string model_id = {});

struct PopulationMoments {
    Vector mean;              ///< u_bar
    Matrix sigma;             ///< sum w_k (u_k u_k^T + Sigma_k)
    Matrix sigma0;            ///< sum w_k u_k u_k^T
    Matrix sigma_bar;         ///< sum w_k ((u_k - u_bar)(u_k - u_bar)^T + Sigma_k)
    Matrix sigma_bar0;        ///< sum w_k (u_k - u_bar)(u_k - u_bar)^T
    Vector sigma_bar0_eigenvalues;
    double lambda_min = 0.0;  ///< lambda_{K-1}(sigma_bar0), clamped at zero
    std::optional<double> sigma2_bar;  ///< weighted variance, spherical models only
    double sigma2_max = 0.0;  ///< sum w_k lambda_max(Sigma_k)
    double sigma2_min = 0.0;  ///< sum w_k lambda_min(Sigma_k)
    double l_bar = 0.0;       ///< sum w_k (||u_k||^2 + tr Sigma_k)
};

PopulationMoments population_moments(const MixtureModel& model);

/// One separability index together with whether its assumption holds.
struct SeparabilityIndex {
    std::optional<double> value;  ///< empty when undefined
    bool holds = false;           ///< value defined and 0 <= value < zeta(w_min)
    std::string reason;
};

struct SeparabilityReport {
    int k = 0;
    double lambda_min = 0.0;
    std::optional<double> sigma2_bar;
    double sigma2_max = 0.0;
    double sigma2_min = 0.0;
    double l_bar = 0.0;
    double w_min = 0.0;
    double w_max = 0.0;
    double zeta_wmin = 0.0;
    SeparabilityIndex delta0;  ///< original data, spherical
    SeparabilityIndex delta1;  ///< after (K-1)-PCA, spherical
    SeparabilityIndex delta2;  ///< original data, log-concave
    SeparabilityIndex delta3;  ///< after (K-1)-PCA, log-concave
    std::optional<double> a;
    std::optional<double> b;
};

/// Evaluates the four separability indices against zeta(w_min).
/// Requires K >= 2. A vanishing lambda_min leaves every index undefined.
SeparabilityReport separability_report(const MixtureModel& model);

struct NonDegeneracy {
    bool holds = false;
    Eigen::Index rank = 0;
    Vector singular_values;
    std::string diagnostic;
};

/// True iff all weights are positive and the K means are linearly independent,
/// counting singular values below tol * sigma_max as zero.
NonDegeneracy check_non_degeneracy(const MixtureModel& model, double tol = 1e-10);

}  // namespace mixclust
