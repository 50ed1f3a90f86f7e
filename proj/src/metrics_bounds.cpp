#include "mixclust/metrics_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mixclust/dimred.hpp"
#include "mixclust/errors.hpp"

namespace mixclust {

namespace {

void check_comparable(const Clustering& c1, const Clustering& c2) {
    if (c1.size() != c2.size()) throw ValidationError("me_distance: clusterings differ in N");
    if (c1.k() != c2.k()) throw ValidationError("me_distance: clusterings differ in K");
    if (c1.size() == 0) throw ValidationError("me_distance: empty clustering");
}

struct SpectralTerms {
    double lower_bound = 0.0;  // D*(V)
    double gap = 0.0;          // lambda_{K-1}(S) - lambda_K(S)
};

SpectralTerms spectral_terms(const Matrix& v, int k) {
    if (k < 2) throw ValidationError("delta: K must be at least 2");
    if (k > v.cols()) throw ValidationError("delta: K exceeds N");
    const ScatterSpectrum s = gram_spectrum(center(v).z);
    SpectralTerms t;
    t.lower_bound = s.trace;
    for (int i = 0; i + 1 < k; ++i) t.lower_bound -= eigenvalue_or_zero(s.eigenvalues, i);
    t.lower_bound = std::max(t.lower_bound, 0.0);
    t.gap = eigenvalue_or_zero(s.eigenvalues, k - 2) - eigenvalue_or_zero(s.eigenvalues, k - 1);
    if (!(t.gap >= 1e-12 * s.trace) || !(t.gap > 0.0)) {
        throw GapError("spectral gap lambda_{K-1}(S) - lambda_K(S) collapsed");
    }
    return t;
}

double delta_from(double scaled_distortion, const SpectralTerms& t) {
    double numerator = scaled_distortion - t.lower_bound;
    // D >= D* holds exactly; only rounding can push the difference below zero.
    if (numerator < 0.0 &&
        -numerator <= 1e-10 * std::max({scaled_distortion, t.lower_bound, 1.0})) {
        numerator = 0.0;
    }
    return numerator / t.gap;
}

BoundReport inapplicable(std::string reason, int k, DeltaSource source) {
    BoundReport r;
    r.k = k;
    r.source = source;
    r.reason = std::move(reason);
    return r;
}

}  // namespace

std::vector<std::vector<long long>> overlap_matrix(const Clustering& c1, const Clustering& c2) {
    check_comparable(c1, c2);
    const auto k = static_cast<std::size_t>(c1.k());
    std::vector<std::vector<long long>> overlap(k, std::vector<long long>(k, 0));
    for (std::size_t n = 0; n < c1.size(); ++n) {
        ++overlap[static_cast<std::size_t>(c1[n])][static_cast<std::size_t>(c2[n])];
    }
    return overlap;
}

std::vector<int> max_weight_assignment(const std::vector<std::vector<long long>>& weight) {
    const std::size_t n = weight.size();
    long long top = 0;
    for (const auto& row : weight) {
        if (row.size() != n) throw ValidationError("assignment: weight matrix must be square");
        for (long long x : row) top = std::max(top, x);
    }
    // Minimise top - w with potentials; rows and columns are 1-based inside.
    constexpr long long kInf = std::numeric_limits<long long>::max() / 4;
    std::vector<long long> u(n + 1, 0), v(n + 1, 0);
    std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        match[0] = i;
        std::size_t j0 = 0;
        std::vector<long long> minv(n + 1, kInf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = match[j0];
            long long delta = kInf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const long long cur = (top - weight[i0 - 1][j - 1]) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> assignment(n, -1);
    for (std::size_t j = 1; j <= n; ++j) {
        if (match[j] != 0) assignment[match[j] - 1] = static_cast<int>(j - 1);
    }
    return assignment;
}

double me_distance(const Clustering& c1, const Clustering& c2) {
    const auto overlap = overlap_matrix(c1, c2);
    const auto assignment = max_weight_assignment(overlap);
    long long matched = 0;
    for (std::size_t i = 0; i < overlap.size(); ++i) {
        matched += overlap[i][static_cast<std::size_t>(assignment[i])];
    }
    return 1.0 - static_cast<double>(matched) / static_cast<double>(c1.size());
}

double me_distance_brute(const Clustering& c1, const Clustering& c2) {
    check_comparable(c1, c2);
    if (c1.k() > 8) throw UnsupportedError("me_distance_brute: K > 8 is not enumerated");
    const auto overlap = overlap_matrix(c1, c2);
    std::vector<int> perm(overlap.size());
    std::iota(perm.begin(), perm.end(), 0);
    long long best = 0;
    do {
        long long total = 0;
        for (std::size_t i = 0; i < perm.size(); ++i) {
            total += overlap[i][static_cast<std::size_t>(perm[i])];
        }
        best = std::max(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return 1.0 - static_cast<double>(best) / static_cast<double>(c1.size());
}

double delta_of_clustering(const Matrix& v, const Clustering& c) {
    const SpectralTerms t = spectral_terms(v, c.k());
    return delta_from(distortion(v, c), t);
}

double delta_gamma(const Matrix& v, const Clustering& c, double gamma) {
    if (!(gamma >= 1.0)) throw ValidationError("delta_gamma: gamma must be >= 1");
    const SpectralTerms t = spectral_terms(v, c.k());
    return delta_from(gamma * distortion(v, c), t);
}

BoundReport bound_from_delta(double delta, double p_min, double p_max, int k) {
    BoundReport r;
    r.delta = delta;
    r.p_min = p_min;
    r.p_max = p_max;
    r.k = k;
    const double km1 = k - 1;
    r.delta_leq_half_kminus1 = delta <= km1 / 2.0;
    try {
        const double t = tau(delta, k);
        r.value = t * p_max;
        r.tau_leq_pmin = t <= p_min;
    } catch (const DomainError&) {
        r.tau_leq_pmin = false;
    }
    if (r.delta_leq_half_kminus1 && r.tau_leq_pmin) {
        r.bound = r.value;
        r.reason = "applicable";
    } else if (!r.delta_leq_half_kminus1) {
        r.reason = "delta exceeds (K-1)/2";
    } else {
        r.reason = "tau(delta) exceeds p_min";
    }
    return r;
}

const char* theorem_name(Theorem t) noexcept {
    switch (t) {
        case Theorem::T1_Original: return "T1_original";
        case Theorem::T2_Pca: return "T2_pca";
        case Theorem::T4_LogConcaveOriginal: return "T4_logconcave_original";
        case Theorem::T5_LogConcavePca: return "T5_logconcave_pca";
    }
    return "unknown";
}

BoundReport theorem_bound(Theorem which, const MixtureModel& model) {
    const int k = model.k();
    if (k < 2) return inapplicable("K must be at least 2", k, DeltaSource::Population);
    const bool spherical_only = which == Theorem::T1_Original || which == Theorem::T2_Pca;
    if (spherical_only && !model.is_spherical()) {
        return inapplicable("requires spherical components", k, DeltaSource::Population);
    }
    const NonDegeneracy nd = check_non_degeneracy(model);
    if (!nd.holds) {
        return inapplicable("non-degenerate condition fails: " + nd.diagnostic, k,
                            DeltaSource::Population);
    }
    const SeparabilityReport sep = separability_report(model);
    const SeparabilityIndex* idx = nullptr;
    switch (which) {
        case Theorem::T1_Original: idx = &sep.delta0; break;
        case Theorem::T2_Pca: idx = &sep.delta1; break;
        case Theorem::T4_LogConcaveOriginal: idx = &sep.delta2; break;
        case Theorem::T5_LogConcavePca: idx = &sep.delta3; break;
    }
    if (!idx->value || *idx->value < 0.0) {
        return inapplicable("separability index undefined: " + idx->reason, k,
                            DeltaSource::Population);
    }
    BoundReport r = bound_from_delta(*idx->value, sep.w_min, sep.w_max, k);
    r.source = DeltaSource::Population;
    return r;
}

BoundReport theorem_bound(Theorem which, const Matrix& v, const Clustering& target) {
    const int k = target.k();
    if (k < 2) return inapplicable("K must be at least 2", k, DeltaSource::Empirical);
    if (target.has_empty_cluster()) {
        return inapplicable("target clustering has an empty cluster", k, DeltaSource::Empirical);
    }
    try {
        double delta = 0.0;
        if (which == Theorem::T1_Original || which == Theorem::T4_LogConcaveOriginal) {
            delta = delta_of_clustering(v, target);
        } else {
            delta = delta_of_clustering(pca_reduce(v, k - 1).v_tilde, target);
        }
        BoundReport r = bound_from_delta(delta, target.p_min(), target.p_max(), k);
        r.source = DeltaSource::Empirical;
        return r;
    } catch (const GapError& e) {
        return inapplicable(e.what(), k, DeltaSource::Empirical);
    }
}

}  // namespace mixclust
