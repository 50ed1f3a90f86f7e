#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mixclust/clustering.hpp"
#include "mixclust/matrix_core.hpp"
#include "mixclust/mixture_models.hpp"
#include "mixclust/tau_zeta.hpp"

namespace mixclust {

/// Misclassification-error distance: 1 - (1/N) max_pi sum_k |C1_k cap C2_pi(k)|.
/// The best permutation comes from a Hungarian solve on the K x K overlap
/// matrix. Throws ValidationError on mismatched N or K.
double me_distance(const Clustering& c1, const Clustering& c2);

/// Same distance by enumerating all K! permutations. Refuses K > 8.
double me_distance_brute(const Clustering& c1, const Clustering& c2);

/// K x K matrix of |C1_i cap C2_j|.
std::vector<std::vector<long long>> overlap_matrix(const Clustering& c1, const Clustering& c2);

/// Maximum-weight perfect matching on a square matrix (Hungarian method,
/// O(K^3)). Returns assignment[row] = column.
std::vector<int> max_weight_assignment(const std::vector<std::vector<long long>>& weight);

/// (D(V, C) - D*(V)) / (lambda_{K-1}(S) - lambda_K(S)).
/// Throws GapError when the gap is below 1e-12 tr(S).
double delta_of_clustering(const Matrix& v, const Clustering& c);

/// (gamma D(V, C) - D*(V)) / (lambda_{K-1}(S) - lambda_K(S)) for gamma >= 1.
double delta_gamma(const Matrix& v, const Clustering& c, double gamma);

enum class DeltaSource { Population, Empirical };

/// A misclassification bound p_max * tau(delta) with its applicability.
///
/// `bound` is set only when delta <= (K-1)/2 and tau(delta) <= p_min, the
/// hypotheses under which the bound is proven. `value` carries
/// tau(delta) * p_max whenever delta lies in tau's domain, so that
/// inapplicable values can still be tabulated.
struct BoundReport {
    std::optional<double> delta;
    std::optional<double> bound;
    std::optional<double> value;
    bool delta_leq_half_kminus1 = false;
    bool tau_leq_pmin = false;
    double p_min = 0.0;
    double p_max = 0.0;
    int k = 0;
    DeltaSource source = DeltaSource::Population;
    std::string reason;

    bool applicable() const noexcept { return bound.has_value(); }
};

BoundReport bound_from_delta(double delta, double p_min, double p_max, int k);

enum class Theorem {
    T1_Original,             ///< spherical, full data, delta0
    T2_Pca,                  ///< spherical, post-(K-1)-PCA, delta1
    T4_LogConcaveOriginal,   ///< log-concave, full data, delta2
    T5_LogConcavePca,        ///< log-concave, post-(K-1)-PCA, delta3
};

const char* theorem_name(Theorem t) noexcept;

/// Population bound tau(delta_i) w_max with p_min = w_min, using the
/// separability index of the chosen theorem (epsilon = 0).
BoundReport theorem_bound(Theorem which, const MixtureModel& model);

/// Empirical bound tau(delta^emp) p_max, where delta^emp is computed from the
/// correct target clustering on V (T1/T4) or on the post-(K-1)-PCA data (T2/T5),
/// and p_min/p_max are the target clustering's cluster fractions.
BoundReport theorem_bound(Theorem which, const Matrix& v, const Clustering& target);

}  // namespace mixclust
