#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "trex/agents.hpp"
#include "trex/attribution.hpp"
#include "trex/clustering.hpp"
#include "trex/config.hpp"
#include "trex/core.hpp"
#include "trex/trajectory.hpp"

namespace trex {

struct ComplementaryReturns {
    int cluster_id = 0;
    VectorReturn values;
    std::uint64_t unknown_state_hits = 0;
};

struct SeedManifest {
    std::uint64_t master = 0;
    std::uint64_t expert = 0;
    std::uint64_t sample = 0;
    std::uint64_t kmeans = 0;
    std::uint64_t original_train = 0;
    std::vector<std::uint64_t> complementary_train;
    std::uint64_t evaluate = 0;
};

struct ClusterSummary {
    int k = 0;
    double silhouette = 0.0;
    double inertia = 0.0;
    int iterations = 0;
    std::vector<std::size_t> sizes;
    std::vector<std::pair<int, double>> scanned;  // (k, silhouette) per candidate
};

struct PreferenceReport {
    std::string env_name;
    PreferenceVector preference;
    std::string config_echo;  // full resolved config JSON, sufficient to re-run
    SeedManifest seeds;
    VectorReturn expert_returns;
    VectorReturn original_returns;
    std::vector<ComplementaryReturns> complementary;
    std::vector<AttributionRecord> attribution;  // sorted by descending ras
    ClusterSummary clusters;
    std::vector<std::vector<SubTrajectory>> representative_windows;  // per cluster
    std::vector<std::string> notes;
};

// Half-to-even rounding at 3 decimals, the precision used by rendered tables.
double round3(double value);

// Markdown table with expert/original/cluster rows; the max total-deviation
// and max ras cells are bold-marked. Throws NoClusters on an empty report.
std::string render_table(const PreferenceReport& report);

// Canonical JSON: sorted keys, shortest round-trip floats, no timestamps.
// Byte-identical across reruns with the same seed.
std::string report_to_json(const PreferenceReport& report);
void export_json(const PreferenceReport& report, const std::string& path);
PreferenceReport report_from_json(const std::string& text);

// Step-level records of each cluster's representative windows, one JSON line
// per step.
void export_representatives(const PreferenceReport& report, const OfflineDataset& dataset,
                            const std::string& path);

// Cluster plot export: pc1, pc2, cluster_id, episode, start.
void write_clusters_csv(const std::vector<std::array<double, 2>>& projected,
                        const Assignment& assignment, const std::vector<Embedding>& embeddings,
                        const std::string& path);

}  // namespace trex
