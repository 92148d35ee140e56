#include "trex/clustering.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include <Eigen/Dense>

namespace trex {

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) {
        throw Error(ErrorCode::dimension_mismatch, "point dimension mismatch");
    }
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double diff = a[i] - b[i];
        d += diff * diff;
    }
    return d;
}

std::vector<std::size_t> Assignment::cluster_sizes() const {
    std::vector<std::size_t> sizes(k, 0);
    for (const Entry& e : entries) {
        ++sizes[e.cluster];
    }
    return sizes;
}

namespace {

int nearest_centroid(const std::vector<std::vector<double>>& centroids,
                     const std::vector<double>& point, double* distance_sq) {
    int best = 0;
    double best_d = squared_distance(centroids[0], point);
    for (int c = 1; c < static_cast<int>(centroids.size()); ++c) {
        double d = squared_distance(centroids[c], point);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    if (distance_sq) {
        *distance_sq = best_d;
    }
    return best;
}

std::vector<std::vector<double>> kmeanspp_init(const std::vector<std::vector<double>>& points,
                                               int k, Rng& rng) {
    std::vector<std::vector<double>> centroids;
    centroids.reserve(k);
    centroids.push_back(points[rng.uniform_int(static_cast<std::uint32_t>(points.size()))]);
    std::vector<double> dist_sq(points.size());
    while (static_cast<int>(centroids.size()) < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            nearest_centroid(centroids, points[i], &dist_sq[i]);
            total += dist_sq[i];
        }
        std::size_t chosen;
        if (total <= 0.0) {
            // All points coincide with existing centroids; any choice works.
            chosen = rng.uniform_int(static_cast<std::uint32_t>(points.size()));
        } else {
            double target = rng.uniform() * total;
            double acc = 0.0;
            chosen = points.size() - 1;
            for (std::size_t i = 0; i < points.size(); ++i) {
                acc += dist_sq[i];
                if (acc >= target) {
                    chosen = i;
                    break;
                }
            }
        }
        centroids.push_back(points[chosen]);
    }
    return centroids;
}

}  // namespace

ClusterModel kmeans_fit(const std::vector<std::vector<double>>& points, int k, std::uint64_t seed) {
    if (k < 1) {
        throw Error(ErrorCode::config_error, "k must be >= 1");
    }
    if (points.size() < static_cast<std::size_t>(k)) {
        throw Error(ErrorCode::too_few_points,
                    std::to_string(points.size()) + " points cannot form " + std::to_string(k) +
                        " clusters");
    }

    Rng rng(seed);
    ClusterModel model;
    model.k = k;
    model.seed = seed;
    model.centroids = kmeanspp_init(points, k, rng);

    const std::size_t dim = points[0].size();
    std::vector<int> labels(points.size(), -1);
    double previous_inertia = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 300; ++iter) {
        bool changed = false;
        double inertia = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            double d = 0.0;
            int c = nearest_centroid(model.centroids, points[i], &d);
            inertia += d;
            if (c != labels[i]) {
                labels[i] = c;
                changed = true;
            }
        }

        // Lloyd iterations never increase inertia.
        assert(inertia <= previous_inertia + 1e-9 * (1.0 + previous_inertia));
        previous_inertia = inertia;
        model.inertia = inertia;
        model.iterations_run = iter + 1;
        if (!changed) {
            break;
        }

        std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < points.size(); ++i) {
            for (std::size_t d = 0; d < dim; ++d) {
                sums[labels[i]][d] += points[i][d];
            }
            ++counts[labels[i]];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // Re-seed an empty cluster with the farthest point.
                std::size_t farthest = 0;
                double farthest_d = -1.0;
                for (std::size_t i = 0; i < points.size(); ++i) {
                    double d = squared_distance(model.centroids[labels[i]], points[i]);
                    if (d > farthest_d) {
                        farthest_d = d;
                        farthest = i;
                    }
                }
                model.centroids[c] = points[farthest];
                previous_inertia = std::numeric_limits<double>::infinity();
            } else {
                for (std::size_t d = 0; d < dim; ++d) {
                    model.centroids[c][d] = sums[c][d] / counts[c];
                }
            }
        }
    }

    // Make the reported inertia consistent with the final centroids even if
    // the iteration cap was hit mid-update.
    double final_inertia = 0.0;
    for (const auto& p : points) {
        double d = 0.0;
        nearest_centroid(model.centroids, p, &d);
        final_inertia += d;
    }
    model.inertia = final_inertia;
    return model;
}

Assignment assign(const ClusterModel& model, const std::vector<std::vector<double>>& points) {
    Assignment assignment;
    assignment.k = model.k;
    assignment.entries.reserve(points.size());
    for (const auto& p : points) {
        double d = 0.0;
        int c = nearest_centroid(model.centroids, p, &d);
        assignment.entries.push_back({c, std::sqrt(d)});
    }
    return assignment;
}

double silhouette(const std::vector<std::vector<double>>& points, const Assignment& assignment) {
    if (assignment.k < 2) {
        throw Error(ErrorCode::degenerate_clustering, "silhouette needs k >= 2");
    }
    if (points.size() != assignment.entries.size()) {
        throw Error(ErrorCode::dimension_mismatch, "assignment does not cover the points");
    }
    std::vector<std::size_t> sizes = assignment.cluster_sizes();
    for (int c = 0; c < assignment.k; ++c) {
        if (sizes[c] == 0) {
            throw Error(ErrorCode::degenerate_clustering,
                        "cluster " + std::to_string(c) + " is empty");
        }
    }

    const std::size_t n = points.size();
    double total = 0.0;
    std::vector<double> mean_dist(assignment.k);
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(mean_dist.begin(), mean_dist.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) {
                continue;
            }
            mean_dist[assignment.entries[j].cluster] +=
                std::sqrt(squared_distance(points[i], points[j]));
        }
        const int own = assignment.entries[i].cluster;
        if (sizes[own] == 1) {
            continue;  // singleton scores 0
        }
        double a = mean_dist[own] / (sizes[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (int c = 0; c < assignment.k; ++c) {
            if (c == own) {
                continue;
            }
            b = std::min(b, mean_dist[c] / sizes[c]);
        }
        double denom = std::max(a, b);
        if (denom > 0.0) {
            total += (b - a) / denom;
        }
    }
    return total / static_cast<double>(n);
}

KSelection select_k(const std::vector<std::vector<double>>& points, KRange k_range,
                    std::uint64_t seed) {
    if (k_range.lo < 2) {
        throw Error(ErrorCode::config_error, "k selection needs k >= 2");
    }
    if (points.size() < static_cast<std::size_t>(k_range.lo) + 1) {
        throw Error(ErrorCode::too_few_points, "k selection needs at least k+1 points");
    }
    const int hi = std::min<int>(k_range.hi, static_cast<int>(points.size()) - 1);

    // Canonical order makes the selection invariant to input permutation.
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return points[a] < points[b];
    });
    std::vector<std::vector<double>> canonical;
    canonical.reserve(points.size());
    for (std::size_t idx : order) {
        canonical.push_back(points[idx]);
    }

    KSelection best;
    best.k = 0;
    for (int k = k_range.lo; k <= hi; ++k) {
        ClusterModel best_model;
        bool have_model = false;
        for (int restart = 0; restart < 5; ++restart) {
            std::uint64_t fit_seed = seed_mix({seed, fnv1a64("kmeans"), static_cast<std::uint64_t>(k),
                                               static_cast<std::uint64_t>(restart)});
            ClusterModel model = kmeans_fit(canonical, k, fit_seed);
            if (!have_model || model.inertia < best_model.inertia) {
                best_model = std::move(model);
                have_model = true;
            }
        }
        Assignment canonical_assignment = assign(best_model, canonical);
        double score;
        try {
            score = silhouette(canonical, canonical_assignment);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::degenerate_clustering) {
                continue;  // a k that cannot fill every cluster is not a candidate
            }
            throw;
        }
        best.scanned.emplace_back(k, score);
        if (best.k == 0 || score > best.silhouette_score) {
            best.k = k;
            best.model = best_model;
            best.silhouette_score = score;
        }
    }
    if (best.k == 0) {
        throw Error(ErrorCode::degenerate_clustering, "no k in range produced a valid clustering");
    }
    // Map the assignment back to the caller's point order.
    best.assignment = assign(best.model, points);
    return best;
}

Standardization standardize(const std::vector<std::vector<double>>& points) {
    Standardization out;
    if (points.empty()) {
        return out;
    }
    const std::size_t dim = points[0].size();
    out.mean.assign(dim, 0.0);
    out.stddev.assign(dim, 0.0);
    for (const auto& p : points) {
        if (p.size() != dim) {
            throw Error(ErrorCode::dimension_mismatch, "ragged point set");
        }
        for (std::size_t d = 0; d < dim; ++d) {
            out.mean[d] += p[d];
        }
    }
    for (double& m : out.mean) {
        m /= static_cast<double>(points.size());
    }
    for (const auto& p : points) {
        for (std::size_t d = 0; d < dim; ++d) {
            double diff = p[d] - out.mean[d];
            out.stddev[d] += diff * diff;
        }
    }
    for (double& s : out.stddev) {
        s = std::sqrt(s / static_cast<double>(points.size()));
    }
    out.points.reserve(points.size());
    for (const auto& p : points) {
        std::vector<double> z(dim);
        for (std::size_t d = 0; d < dim; ++d) {
            double scale = out.stddev[d];
            z[d] = scale > 1e-12 ? (p[d] - out.mean[d]) / scale : 0.0;
        }
        out.points.push_back(std::move(z));
    }
    return out;
}

std::vector<std::array<double, 2>> pca_2d(const std::vector<std::vector<double>>& points) {
    if (points.size() < 2) {
        throw Error(ErrorCode::too_few_points, "PCA needs at least 2 points");
    }
    const std::size_t n = points.size();
    const std::size_t dim = points[0].size();

    Eigen::MatrixXd centered(n, dim);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
    for (std::size_t i = 0; i < n; ++i) {
        if (points[i].size() != dim) {
            throw Error(ErrorCode::dimension_mismatch, "ragged point set");
        }
        for (std::size_t d = 0; d < dim; ++d) {
            centered(i, d) = points[i][d];
            mean(d) += points[i][d];
        }
    }
    mean /= static_cast<double>(n);
    centered.rowwise() -= mean.transpose();

    Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::not_finite, "eigendecomposition failed");
    }

    // Eigen returns ascending eigenvalues; take the top two columns.
    std::array<Eigen::VectorXd, 2> components;
    for (int c = 0; c < 2; ++c) {
        int col = static_cast<int>(dim) - 1 - c;
        Eigen::VectorXd v = col >= 0 ? solver.eigenvectors().col(col).eval()
                                     : Eigen::VectorXd::Zero(dim).eval();
        // Fix the sign so the largest-magnitude loading is positive.
        int max_idx = 0;
        for (int d = 1; d < v.size(); ++d) {
            if (std::abs(v(d)) > std::abs(v(max_idx))) {
                max_idx = d;
            }
        }
        if (v.size() > 0 && v(max_idx) < 0.0) {
            v = -v;
        }
        components[c] = v;
    }

    std::vector<std::array<double, 2>> projected(n);
    for (std::size_t i = 0; i < n; ++i) {
        projected[i][0] = centered.row(i).dot(components[0]);
        projected[i][1] = centered.row(i).dot(components[1]);
    }
    return projected;
}

std::vector<std::vector<std::size_t>> representatives(const ClusterModel& model,
                                                      const std::vector<Embedding>& embeddings,
                                                      const std::vector<std::vector<double>>& points,
                                                      int n_per_cluster) {
    if (n_per_cluster < 1) {
        throw Error(ErrorCode::config_error, "n_per_cluster must be >= 1");
    }
    if (embeddings.size() != points.size()) {
        throw Error(ErrorCode::dimension_mismatch, "embeddings and points must align");
    }
    Assignment assignment = assign(model, points);
    std::vector<std::vector<std::size_t>> members(model.k);
    for (std::size_t i = 0; i < points.size(); ++i) {
        members[assignment.entries[i].cluster].push_back(i);
    }
    std::vector<std::vector<std::size_t>> out(model.k);
    for (int c = 0; c < model.k; ++c) {
        std::sort(members[c].begin(), members[c].end(), [&](std::size_t a, std::size_t b) {
            const auto& wa = embeddings[a].source;
            const auto& wb = embeddings[b].source;
            return std::tie(assignment.entries[a].distance, wa.episode_id, wa.start) <
                   std::tie(assignment.entries[b].distance, wb.episode_id, wb.start);
        });
        std::size_t take = std::min<std::size_t>(n_per_cluster, members[c].size());
        out[c].assign(members[c].begin(), members[c].begin() + take);
    }
    return out;
}

}  // namespace trex
