#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "trex/config.hpp"
#include "trex/core.hpp"
#include "trex/trajectory.hpp"

namespace trex {

struct ClusterModel {
    int k = 0;
    std::vector<std::vector<double>> centroids;
    double inertia = 0.0;
    std::uint64_t seed = 0;
    int iterations_run = 0;
};

struct Assignment {
    struct Entry {
        int cluster = 0;
        double distance = 0.0;
    };
    int k = 0;
    std::vector<Entry> entries;  // one per point, same order as the input

    std::vector<std::size_t> cluster_sizes() const;
};

// K-means with k-means++ initialization and Lloyd iterations until the
// assignment reaches a fixpoint (or 300 iterations). Empty clusters are
// re-seeded with the point farthest from its assigned centroid.
ClusterModel kmeans_fit(const std::vector<std::vector<double>>& points, int k, std::uint64_t seed);

// Nearest-centroid assignment; ties go to the lowest cluster id.
Assignment assign(const ClusterModel& model, const std::vector<std::vector<double>>& points);

// Mean silhouette score in [-1, 1]. Points in singleton clusters score 0, as
// does the degenerate a = b = 0 case.
double silhouette(const std::vector<std::vector<double>>& points, const Assignment& assignment);

struct KSelection {
    int k = 0;
    ClusterModel model;
    Assignment assignment;
    double silhouette_score = 0.0;
    // silhouette per candidate k, in k order
    std::vector<std::pair<int, double>> scanned;
};

// Fits every k in [lo, hi] with 5 seeded restarts (keeping the best-inertia
// model per k) and returns the k with the highest silhouette, ties toward the
// smaller k. Points are brought into a canonical order before fitting so the
// selection is invariant to input permutation.
KSelection select_k(const std::vector<std::vector<double>>& points, KRange k_range,
                    std::uint64_t seed);

// Per-dimension z-score standardization. Dimensions with (near-)zero spread
// are mapped to 0.
struct Standardization {
    std::vector<std::vector<double>> points;
    std::vector<double> mean;
    std::vector<double> stddev;
};

Standardization standardize(const std::vector<std::vector<double>>& points);

// Mean-centered projection onto the top-2 principal components (covariance
// eigenvectors in descending eigenvalue order, sign fixed so each component's
// largest-magnitude loading is positive).
std::vector<std::array<double, 2>> pca_2d(const std::vector<std::vector<double>>& points);

// Per cluster, the indices of the n member points closest to the centroid;
// ties break by the window's (episode, start).
std::vector<std::vector<std::size_t>> representatives(const ClusterModel& model,
                                                      const std::vector<Embedding>& embeddings,
                                                      const std::vector<std::vector<double>>& points,
                                                      int n_per_cluster);

double squared_distance(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace trex
