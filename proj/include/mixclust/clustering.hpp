#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mixclust/matrix_core.hpp"

namespace mixclust {

/// A K-partition of sample indices 0..N-1, stored as a label per sample.
/// Labels lie in [0, K); empty clusters are representable.
class Clustering {
public:
    Clustering() = default;
    /// Throws ValidationError when a label is outside [0, k) or k < 1.
    Clustering(std::vector<int> labels, int k);

    int k() const noexcept { return k_; }
    std::size_t size() const noexcept { return labels_.size(); }
    const std::vector<int>& labels() const noexcept { return labels_; }
    int operator[](std::size_t n) const { return labels_[n]; }

    std::vector<std::size_t> cluster_sizes() const;
    /// Smallest / largest cluster fraction |C_k| / N.
    double p_min() const;
    double p_max() const;
    bool has_empty_cluster() const;

    friend bool operator==(const Clustering&, const Clustering&) = default;

private:
    std::vector<int> labels_;
    int k_ = 0;
};

enum class Seeding { KMeansPlusPlus, UniformRandom };

struct KMeansConfig {
    int restarts = 10;
    int max_iter = 1000;
    double rel_tol = 1e-10;
    Seeding seeding = Seeding::KMeansPlusPlus;
    std::uint64_t seed = 0;
};

struct KMeansResult {
    Clustering clustering;
    double distortion = 0.0;
    int iterations = 0;         ///< Lloyd iterations of the winning restart
    int best_restart = 0;
    /// Distortion after every Lloyd update of the winning restart.
    std::vector<double> history;
};

/// Sum of squared distances from each sample to its cluster centroid.
/// Empty clusters contribute zero. Throws ValidationError on size mismatch.
double distortion(const Matrix& v, const Clustering& c);

/// Same quantity through the membership form ||V - V Hbar^T Hbar||_F^2.
/// Kept as an independent route for cross-checking.
double distortion_membership_form(const Matrix& v, const Clustering& c);

/// Spectral lower bound over all K-clusterings:
/// D*(V) = tr(S) - sum_{k<K} lambda_k(S), with S = Z^T Z and Z the centered data.
/// Throws ValidationError when K > N or K < 1.
double distortion_lower_bound(const Matrix& v, int k);

/// Lloyd's algorithm with k-means++ (or uniform) seeding and restarts.
/// Restart r draws from the stream derive_seed(cfg.seed, r); the best restart
/// wins with ties going to the lowest index. Throws ValidationError if K > N.
KMeansResult kmeans(const Matrix& v, int k, const KMeansConfig& cfg = {});

/// Exhaustive global minimizer of the distortion over partitions into at most
/// K blocks. Refuses (UnsupportedError) when the search space exceeds 1e7.
struct BruteForceResult {
    Clustering clustering;
    double distortion = 0.0;
};
BruteForceResult brute_force_optimal(const Matrix& v, int k);

/// Number of set partitions of N items into at most K blocks
/// (sum of Stirling numbers of the second kind), saturating at UINT64_MAX.
std::uint64_t partition_count(int n, int k);

/// Calls `visit` with the labels of every set partition of {0..n-1} into at
/// most `k` blocks (or exactly `k` blocks when `exact` is set). Labels follow
/// restricted-growth order so each partition is visited once.
void for_each_partition(int n, int k, bool exact,
                        const std::function<void(std::span<const int>)>& visit);

}  // namespace mixclust
