#include "mixclust/mixture_models.hpp"

#include <cmath>
#include <random>
#include <string>

#include "mixclust/errors.hpp"
#include "mixclust/tau_zeta.hpp"

namespace mixclust {

namespace {

constexpr double kWeightTol = 1e-12;
// lambda_min below this fraction of the largest eigenvalue of sigma_bar0 is zero.
constexpr double kRankTol = 1e-10;

void require_positive(const Vector& p, const char* what) {
    if (p.size() == 0) throw ValidationError(std::string(what) + ": empty parameter vector");
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (!(p(i) > 0.0) || !std::isfinite(p(i))) {
            throw ValidationError(std::string(what) + ": parameters must be finite and positive");
        }
    }
}

}  // namespace

const char* family_name(Family f) noexcept {
    switch (f) {
        case Family::SphericalGaussian: return "spherical_gaussian";
        case Family::DiagonalGaussian: return "diagonal_gaussian";
        case Family::Laplace: return "laplace";
        case Family::UniformBox: return "uniform_box";
    }
    return "unknown";
}

ComponentDistribution::ComponentDistribution(Family family, double variance, Vector params)
    : family_(family), variance_(variance), params_(std::move(params)) {}

ComponentDistribution ComponentDistribution::spherical_gaussian(double variance) {
    if (!(variance >= 0.0) || !std::isfinite(variance)) {
        throw ValidationError("spherical_gaussian: variance must be finite and >= 0");
    }
    return ComponentDistribution(Family::SphericalGaussian, variance, Vector());
}

ComponentDistribution ComponentDistribution::diagonal_gaussian(Vector variances) {
    require_positive(variances, "diagonal_gaussian");
    return ComponentDistribution(Family::DiagonalGaussian, 0.0, std::move(variances));
}

ComponentDistribution ComponentDistribution::laplace(Vector scales) {
    require_positive(scales, "laplace");
    return ComponentDistribution(Family::Laplace, 0.0, std::move(scales));
}

ComponentDistribution ComponentDistribution::uniform_box(Vector half_widths) {
    require_positive(half_widths, "uniform_box");
    return ComponentDistribution(Family::UniformBox, 0.0, std::move(half_widths));
}

double ComponentDistribution::spherical_variance() const {
    if (!is_spherical()) throw ValidationError("component is not spherical");
    return variance_;
}

Vector ComponentDistribution::coordinate_variances(Eigen::Index dim) const {
    switch (family_) {
        case Family::SphericalGaussian: return Vector::Constant(dim, variance_);
        case Family::DiagonalGaussian: return params_;
        case Family::Laplace: return 2.0 * params_.array().square();
        case Family::UniformBox: return params_.array().square() / 3.0;
    }
    return Vector();
}

void ComponentDistribution::draw(SplitMix64& rng, Eigen::Ref<Vector> out) const {
    const Eigen::Index dim = out.size();
    switch (family_) {
        case Family::SphericalGaussian: {
            if (variance_ == 0.0) {
                out.setZero();
                return;
            }
            std::normal_distribution<double> normal(0.0, std::sqrt(variance_));
            for (Eigen::Index f = 0; f < dim; ++f) out(f) = normal(rng);
            return;
        }
        case Family::DiagonalGaussian: {
            std::normal_distribution<double> normal(0.0, 1.0);
            for (Eigen::Index f = 0; f < dim; ++f) out(f) = std::sqrt(params_(f)) * normal(rng);
            return;
        }
        case Family::Laplace: {
            // Inverse CDF: x = -b sgn(u) ln(1 - 2|u|), u uniform on (-1/2, 1/2).
            for (Eigen::Index f = 0; f < dim; ++f) {
                double u = rng.uniform() - 0.5;
                while (u == -0.5) u = rng.uniform() - 0.5;
                const double mag = -params_(f) * std::log1p(-2.0 * std::abs(u));
                out(f) = u < 0.0 ? -mag : mag;
            }
            return;
        }
        case Family::UniformBox: {
            for (Eigen::Index f = 0; f < dim; ++f) {
                out(f) = params_(f) * (2.0 * rng.uniform() - 1.0);
            }
            return;
        }
    }
}

MixtureModel::MixtureModel(Vector weights, Matrix means,
                           std::vector<ComponentDistribution> components)
    : weights_(std::move(weights)), means_(std::move(means)), components_(std::move(components)) {
    const Eigen::Index k = weights_.size();
    if (k < 1) throw ValidationError("mixture: need at least one component");
    if (means_.cols() != k) throw ValidationError("mixture: means must have one column per component");
    if (static_cast<Eigen::Index>(components_.size()) != k) {
        throw ValidationError("mixture: need one component distribution per weight");
    }
    if (means_.rows() < 1) throw ValidationError("mixture: ambient dimension must be positive");
    if (!means_.allFinite()) throw ValidationError("mixture: means must be finite");
    for (Eigen::Index i = 0; i < k; ++i) {
        if (!(weights_(i) >= 0.0)) throw ValidationError("mixture: weights must be non-negative");
    }
    if (std::abs(weights_.sum() - 1.0) > kWeightTol) {
        throw ValidationError("mixture: weights must sum to 1");
    }
    for (const auto& c : components_) {
        if (!c.is_spherical() && c.params().size() != means_.rows()) {
            throw ValidationError(std::string("mixture: ") + family_name(c.family()) +
                                  " parameters must have length F");
        }
    }
}

bool MixtureModel::is_spherical() const {
    for (const auto& c : components_) {
        if (!c.is_spherical()) return false;
    }
    return true;
}

MixtureModel MixtureModel::with_spherical_variance(double sigma2) const {
    std::vector<ComponentDistribution> comps(components_.size(),
                                             ComponentDistribution::spherical_gaussian(sigma2));
    return MixtureModel(weights_, means_, std::move(comps));
}

Matrix hypercube_means(Eigen::Index dim, int k, std::uint64_t seed) {
    Matrix means(dim, k);
    for (int j = 0; j < k; ++j) {
        SplitMix64 rng = make_stream(seed, static_cast<std::uint64_t>(j));
        for (Eigen::Index f = 0; f < dim; ++f) means(f, j) = rng.uniform();
    }
    return means;
}

LabeledDataset sample(const MixtureModel& model, std::size_t n, std::uint64_t seed,
                      std::string model_id) {
    if (n < 1) throw ValidationError("sample: N must be at least 1");
    const Eigen::Index dim = model.dim();
    const int k = model.k();

    Vector cumulative(k);
    double acc = 0.0;
    for (int j = 0; j < k; ++j) {
        acc += model.weights()(j);
        cumulative(j) = acc;
    }

    LabeledDataset out;
    out.v.resize(dim, static_cast<Eigen::Index>(n));
    std::vector<int> labels(n);
    Vector noise(dim);
    for (std::size_t i = 0; i < n; ++i) {
        SplitMix64 rng = make_stream(seed, i);
        const double u = rng.uniform() * acc;
        int label = k - 1;
        for (int j = 0; j < k; ++j) {
            if (u < cumulative(j) && model.weights()(j) > 0.0) {
                label = j;
                break;
            }
        }
        model.components()[static_cast<std::size_t>(label)].draw(rng, noise);
        out.v.col(static_cast<Eigen::Index>(i)) = model.means().col(label) + noise;
        labels[i] = label;
    }
    out.target = Clustering(std::move(labels), k);
    out.model_id = std::move(model_id);
    return out;
}

PopulationMoments population_moments(const MixtureModel& model) {
    const Eigen::Index dim = model.dim();
    const int k = model.k();
    const Vector& w = model.weights();
    const Matrix& u = model.means();

    PopulationMoments m;
    m.mean = u * w;
    m.sigma0 = Matrix::Zero(dim, dim);
    m.sigma_bar0 = Matrix::Zero(dim, dim);
    Matrix within = Matrix::Zero(dim, dim);
    double sigma2_bar = 0.0;
    for (int j = 0; j < k; ++j) {
        const Vector uj = u.col(j);
        const Vector centred = uj - m.mean;
        m.sigma0.noalias() += w(j) * uj * uj.transpose();
        m.sigma_bar0.noalias() += w(j) * centred * centred.transpose();
        const auto& comp = model.components()[static_cast<std::size_t>(j)];
        const Vector var = comp.coordinate_variances(dim);
        within.diagonal() += w(j) * var;
        m.sigma2_max += w(j) * var.maxCoeff();
        m.sigma2_min += w(j) * var.minCoeff();
        m.l_bar += w(j) * (uj.squaredNorm() + var.sum());
        if (comp.is_spherical()) sigma2_bar += w(j) * comp.spherical_variance();
    }
    m.sigma = m.sigma0 + within;
    m.sigma_bar = m.sigma_bar0 + within;
    if (model.is_spherical()) m.sigma2_bar = sigma2_bar;

    m.sigma_bar0_eigenvalues = sym_eigenvalues(m.sigma_bar0);
    if (k >= 2) {
        const double top = std::max(m.sigma_bar0_eigenvalues(0), 0.0);
        const double lam = eigenvalue_or_zero(m.sigma_bar0_eigenvalues, k - 2);
        m.lambda_min = (lam > kRankTol * top) ? lam : 0.0;
    }
    return m;
}

SeparabilityReport separability_report(const MixtureModel& model) {
    const int k = model.k();
    if (k < 2) throw ValidationError("separability_report: need K >= 2");
    const PopulationMoments m = population_moments(model);
    const Eigen::Index dim = model.dim();

    SeparabilityReport r;
    r.k = k;
    r.lambda_min = m.lambda_min;
    r.sigma2_bar = m.sigma2_bar;
    r.sigma2_max = m.sigma2_max;
    r.sigma2_min = m.sigma2_min;
    r.l_bar = m.l_bar;
    r.w_min = model.w_min();
    r.w_max = model.w_max();
    r.zeta_wmin = zeta(r.w_min, k);

    auto judge = [&](SeparabilityIndex& idx, double numerator, double denominator) {
        if (!(denominator > 0.0)) {
            idx.reason = "denominator is not positive";
            return;
        }
        const double value = numerator / denominator;
        idx.value = value;
        if (!(value > 0.0) && numerator != 0.0) {
            idx.reason = "index is not positive";
            return;
        }
        idx.holds = value < r.zeta_wmin;
        idx.reason = idx.holds ? "holds" : "index is not below zeta(w_min)";
    };

    if (!(m.lambda_min > 0.0)) {
        for (auto* idx : {&r.delta0, &r.delta1, &r.delta2, &r.delta3}) {
            idx->reason = "non-degenerate condition fails";
        }
        return r;
    }

    const double km1 = k - 1;
    if (m.sigma2_bar) {
        const double s2 = *m.sigma2_bar;
        judge(r.delta0, km1 * s2, m.lambda_min);
        judge(r.delta1, km1 * s2, m.lambda_min + s2);
    } else {
        r.delta0.reason = r.delta1.reason = "requires spherical components";
    }

    const double fd = static_cast<double>(dim);
    const double num2 = fd * m.sigma2_max - (fd - km1) * m.sigma2_min;
    judge(r.delta2, num2, m.lambda_min + m.sigma2_min - m.sigma2_max);
    // delta2 has to be strictly positive. A zero numerator only happens for
    // point masses, which satisfy the bound trivially.
    if (r.delta2.value && *r.delta2.value < 0.0) r.delta2.holds = false;

    const double root = std::sqrt(2.0 * km1 * m.sigma2_max / m.lambda_min);
    r.a = (1.0 + k) * m.l_bar * root;
    r.b = (m.l_bar - m.mean.squaredNorm()) * root;
    judge(r.delta3, km1 * m.sigma2_max + *r.a, m.lambda_min + m.sigma2_min - *r.b);
    return r;
}

NonDegeneracy check_non_degeneracy(const MixtureModel& model, double tol) {
    NonDegeneracy out;
    const int k = model.k();
    Eigen::JacobiSVD<Matrix> svd(model.means());
    out.singular_values = svd.singularValues();
    const double top = out.singular_values.size() > 0 ? out.singular_values(0) : 0.0;
    for (Eigen::Index i = 0; i < out.singular_values.size(); ++i) {
        if (top > 0.0 && out.singular_values(i) > tol * top) ++out.rank;
    }
    const bool positive = (model.weights().array() > 0.0).all();
    out.holds = positive && out.rank == k;
    if (!positive) {
        out.diagnostic = "a mixing weight is zero";
    } else if (out.rank < k) {
        out.diagnostic = "means span " + std::to_string(out.rank) + " of " + std::to_string(k) +
                         " dimensions";
    } else {
        out.diagnostic = "means span a " + std::to_string(k) + "-dimensional subspace";
    }
    return out;
}

}  // namespace mixclust
