#include "mixclust/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mixclust/errors.hpp"
#include "mixclust/rng.hpp"

namespace mixclust {

Clustering::Clustering(std::vector<int> labels, int k) : labels_(std::move(labels)), k_(k) {
    if (k_ < 1) throw ValidationError("clustering: K must be at least 1");
    for (int l : labels_) {
        if (l < 0 || l >= k_) throw ValidationError("clustering: label outside [0, K)");
    }
}

std::vector<std::size_t> Clustering::cluster_sizes() const {
    std::vector<std::size_t> sizes(static_cast<std::size_t>(k_), 0);
    for (int l : labels_) ++sizes[static_cast<std::size_t>(l)];
    return sizes;
}

double Clustering::p_min() const {
    const auto sizes = cluster_sizes();
    return static_cast<double>(*std::min_element(sizes.begin(), sizes.end())) /
           static_cast<double>(labels_.size());
}

double Clustering::p_max() const {
    const auto sizes = cluster_sizes();
    return static_cast<double>(*std::max_element(sizes.begin(), sizes.end())) /
           static_cast<double>(labels_.size());
}

bool Clustering::has_empty_cluster() const {
    const auto sizes = cluster_sizes();
    return std::find(sizes.begin(), sizes.end(), std::size_t{0}) != sizes.end();
}

namespace {

void check_shape(const Matrix& v, const Clustering& c) {
    if (static_cast<std::size_t>(v.cols()) != c.size()) {
        throw ValidationError("clustering size does not match the number of samples");
    }
}

// Cluster means; empty clusters keep a zero column.
Matrix centroids_of(const Matrix& v, std::span<const int> labels, int k,
                    std::vector<std::size_t>& counts) {
    Matrix c = Matrix::Zero(v.rows(), k);
    counts.assign(static_cast<std::size_t>(k), 0);
    for (std::size_t n = 0; n < labels.size(); ++n) {
        c.col(labels[n]) += v.col(static_cast<Eigen::Index>(n));
        ++counts[static_cast<std::size_t>(labels[n])];
    }
    for (int j = 0; j < k; ++j) {
        if (counts[static_cast<std::size_t>(j)] > 0) {
            c.col(j) /= static_cast<double>(counts[static_cast<std::size_t>(j)]);
        }
    }
    return c;
}

double distortion_of_labels(const Matrix& v, std::span<const int> labels, int k) {
    std::vector<std::size_t> counts;
    const Matrix c = centroids_of(v, labels, k, counts);
    double total = 0.0;
    for (std::size_t n = 0; n < labels.size(); ++n) {
        total += (v.col(static_cast<Eigen::Index>(n)) - c.col(labels[n])).squaredNorm();
    }
    return total;
}

// Nearest centroid per sample; ties go to the lowest cluster index.
void assign(const Matrix& v, const Matrix& centroids, std::vector<int>& labels,
            std::vector<double>& dist) {
    const Eigen::Index n = v.cols();
    const Eigen::Index k = centroids.cols();
    labels.resize(static_cast<std::size_t>(n));
    dist.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < k; ++j) {
            const double d = (v.col(i) - centroids.col(j)).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(j);
            }
        }
        labels[static_cast<std::size_t>(i)] = best;
        dist[static_cast<std::size_t>(i)] = best_d;
    }
}

// Moves the sample farthest from its centroid (among clusters that can spare
// one) into each empty cluster.
void repair_empty(std::vector<int>& labels, std::vector<double>& dist, int k) {
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (int l : labels) ++counts[static_cast<std::size_t>(l)];
    for (int j = 0; j < k; ++j) {
        if (counts[static_cast<std::size_t>(j)] > 0) continue;
        std::size_t pick = labels.size();
        double far = -1.0;
        for (std::size_t n = 0; n < labels.size(); ++n) {
            if (counts[static_cast<std::size_t>(labels[n])] < 2) continue;
            if (dist[n] > far) {
                far = dist[n];
                pick = n;
            }
        }
        if (pick == labels.size()) return;  // K > N; unreachable after validation
        --counts[static_cast<std::size_t>(labels[pick])];
        labels[pick] = j;
        dist[pick] = 0.0;
        ++counts[static_cast<std::size_t>(j)];
    }
}

Matrix seed_centroids(const Matrix& v, int k, Seeding seeding, SplitMix64& rng) {
    const Eigen::Index n = v.cols();
    Matrix c(v.rows(), k);
    auto uniform_index = [&](Eigen::Index bound) {
        return std::min(static_cast<Eigen::Index>(rng.uniform() * static_cast<double>(bound)),
                        bound - 1);
    };

    if (seeding == Seeding::UniformRandom) {
        std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
        std::iota(idx.begin(), idx.end(), Eigen::Index{0});
        for (int j = 0; j < k; ++j) {
            const Eigen::Index pick = j + uniform_index(n - j);
            std::swap(idx[static_cast<std::size_t>(j)], idx[static_cast<std::size_t>(pick)]);
            c.col(j) = v.col(idx[static_cast<std::size_t>(j)]);
        }
        return c;
    }

    c.col(0) = v.col(uniform_index(n));
    std::vector<double> d2(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        d2[static_cast<std::size_t>(i)] = (v.col(i) - c.col(0)).squaredNorm();
    }
    for (int j = 1; j < k; ++j) {
        const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
        Eigen::Index pick = 0;
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double acc = 0.0;
            pick = n - 1;
            for (Eigen::Index i = 0; i < n; ++i) {
                acc += d2[static_cast<std::size_t>(i)];
                if (acc > target && d2[static_cast<std::size_t>(i)] > 0.0) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = uniform_index(n);
        }
        c.col(j) = v.col(pick);
        for (Eigen::Index i = 0; i < n; ++i) {
            auto& d = d2[static_cast<std::size_t>(i)];
            d = std::min(d, (v.col(i) - c.col(j)).squaredNorm());
        }
    }
    return c;
}

struct LloydRun {
    std::vector<int> labels;
    double distortion = 0.0;
    int iterations = 0;
    std::vector<double> history;
};

LloydRun lloyd(const Matrix& v, int k, Matrix centroids, const KMeansConfig& cfg) {
    LloydRun run;
    std::vector<double> dist;
    assign(v, centroids, run.labels, dist);
    std::vector<int> next;
    std::vector<std::size_t> counts;
    double previous = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= cfg.max_iter; ++it) {
        repair_empty(run.labels, dist, k);
        centroids = centroids_of(v, run.labels, k, counts);
        double d = 0.0;
        for (std::size_t n = 0; n < run.labels.size(); ++n) {
            d += (v.col(static_cast<Eigen::Index>(n)) - centroids.col(run.labels[n])).squaredNorm();
        }
        run.history.push_back(d);
        run.iterations = it;
        run.distortion = d;
        if (std::isfinite(previous) && previous - d <= cfg.rel_tol * previous) break;
        assign(v, centroids, next, dist);
        if (next == run.labels) break;
        run.labels.swap(next);
        previous = d;
    }
    return run;
}

}  // namespace

double distortion(const Matrix& v, const Clustering& c) {
    check_shape(v, c);
    return distortion_of_labels(v, c.labels(), c.k());
}

double distortion_membership_form(const Matrix& v, const Clustering& c) {
    check_shape(v, c);
    // ||V||_F^2 - tr(Hbar V^T V Hbar^T) = ||V||_F^2 - sum_k ||sum_{n in C_k} v_n||^2 / n_k
    Matrix sums = Matrix::Zero(v.rows(), c.k());
    std::vector<double> counts(static_cast<std::size_t>(c.k()), 0.0);
    for (std::size_t n = 0; n < c.size(); ++n) {
        sums.col(c[n]) += v.col(static_cast<Eigen::Index>(n));
        counts[static_cast<std::size_t>(c[n])] += 1.0;
    }
    double explained = 0.0;
    for (int j = 0; j < c.k(); ++j) {
        if (counts[static_cast<std::size_t>(j)] > 0.0) {
            explained += sums.col(j).squaredNorm() / counts[static_cast<std::size_t>(j)];
        }
    }
    return v.squaredNorm() - explained;
}

double distortion_lower_bound(const Matrix& v, int k) {
    if (k < 1) throw ValidationError("distortion_lower_bound: K must be at least 1");
    if (k > v.cols()) throw ValidationError("distortion_lower_bound: K exceeds N");
    const ScatterSpectrum s = gram_spectrum(center(v).z);
    double bound = s.trace;
    for (int i = 0; i + 1 < k; ++i) bound -= eigenvalue_or_zero(s.eigenvalues, i);
    return std::max(bound, 0.0);
}

KMeansResult kmeans(const Matrix& v, int k, const KMeansConfig& cfg) {
    if (k < 1) throw ValidationError("kmeans: K must be at least 1");
    if (k > v.cols()) throw ValidationError("kmeans: K exceeds N");
    if (cfg.restarts < 1 || cfg.max_iter < 1) {
        throw ValidationError("kmeans: restarts and max_iter must be at least 1");
    }
    KMeansResult best;
    double best_d = std::numeric_limits<double>::infinity();
    for (int r = 0; r < cfg.restarts; ++r) {
        SplitMix64 rng = make_stream(cfg.seed, static_cast<std::uint64_t>(r));
        LloydRun run = lloyd(v, k, seed_centroids(v, k, cfg.seeding, rng), cfg);
        if (run.distortion < best_d) {
            best_d = run.distortion;
            best.clustering = Clustering(std::move(run.labels), k);
            best.iterations = run.iterations;
            best.best_restart = r;
            best.history = std::move(run.history);
        }
    }
    best.distortion = distortion(v, best.clustering);
    return best;
}

std::uint64_t partition_count(int n, int k) {
    if (n < 0 || k < 0) return 0;
    if (n == 0) return 1;
    constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
    auto sat_add = [](std::uint64_t a, std::uint64_t b) { return a > kMax - b ? kMax : a + b; };
    auto sat_mul = [](std::uint64_t a, std::uint64_t b) {
        return (b != 0 && a > kMax / b) ? kMax : a * b;
    };
    // stirling[j] = S(i, j) for the current row i.
    std::vector<std::uint64_t> stirling(static_cast<std::size_t>(k) + 1, 0);
    stirling[0] = 1;
    for (int i = 1; i <= n; ++i) {
        for (int j = std::min(i, k); j >= 1; --j) {
            stirling[static_cast<std::size_t>(j)] =
                sat_add(sat_mul(static_cast<std::uint64_t>(j), stirling[static_cast<std::size_t>(j)]),
                        stirling[static_cast<std::size_t>(j) - 1]);
        }
        stirling[0] = 0;
    }
    std::uint64_t total = 0;
    for (int j = 1; j <= k; ++j) total = sat_add(total, stirling[static_cast<std::size_t>(j)]);
    return total;
}

void for_each_partition(int n, int k, bool exact,
                        const std::function<void(std::span<const int>)>& visit) {
    if (n < 1 || k < 1) return;
    std::vector<int> labels(static_cast<std::size_t>(n), 0);
    // Restricted growth strings: labels[i] <= 1 + max(labels[0..i-1]).
    auto recurse = [&](auto&& self, int pos, int blocks) -> void {
        if (exact && blocks + (n - pos) < k) return;
        if (pos == n) {
            if (!exact || blocks == k) visit(labels);
            return;
        }
        const int limit = std::min(blocks, k - 1);
        for (int l = 0; l <= limit; ++l) {
            labels[static_cast<std::size_t>(pos)] = l;
            self(self, pos + 1, l == blocks ? blocks + 1 : blocks);
        }
    };
    labels[0] = 0;
    recurse(recurse, 1, 1);
}

BruteForceResult brute_force_optimal(const Matrix& v, int k) {
    if (k < 1) throw ValidationError("brute_force_optimal: K must be at least 1");
    const auto n = static_cast<int>(v.cols());
    if (n < 1) throw ValidationError("brute_force_optimal: no samples");
    if (partition_count(n, k) > 10'000'000ULL) {
        throw UnsupportedError("brute_force_optimal: search space exceeds 1e7 partitions");
    }
    std::vector<int> best_labels;
    double best = std::numeric_limits<double>::infinity();
    for_each_partition(n, k, false, [&](std::span<const int> labels) {
        const double d = distortion_of_labels(v, labels, k);
        if (d < best) {
            best = d;
            best_labels.assign(labels.begin(), labels.end());
        }
    });
    BruteForceResult out;
    out.clustering = Clustering(std::move(best_labels), k);
    out.distortion = best;
    return out;
}

}  // namespace mixclust
