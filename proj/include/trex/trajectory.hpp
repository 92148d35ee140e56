#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trex/agents.hpp"
#include "trex/config.hpp"
#include "trex/core.hpp"
#include "trex/envs.hpp"

namespace trex {

// A half-open window [start, end) of steps inside one episode.
struct SubTrajectory {
    int episode_id = 0;
    int start = 0;
    int end = 0;

    int length() const { return end - start; }

    friend bool operator==(const SubTrajectory&, const SubTrajectory&) = default;
};

struct Embedding {
    std::vector<double> vector;
    std::string encoder_id;
    SubTrajectory source;
};

// Rolls out m epsilon-mixed episodes of the policy, each capped at T steps.
// Per-episode seeds derive deterministically from (seed, episode index).
OfflineDataset sample_dataset(const Policy& policy, const Env& env, const PreferenceVector& pref,
                              int m, int T, double epsilon, std::uint64_t seed);

// Splits a trajectory into overlapping windows of length l with stride
// l - alpha. If the last stride-aligned window leaves a tail uncovered, one
// end-aligned window [len - l, len) is appended. Trajectories shorter than l
// yield a single full-trajectory window.
std::vector<SubTrajectory> split(const Trajectory& t, int l, int alpha);

// All windows of a dataset, ordered by (episode, start).
std::vector<SubTrajectory> split_dataset(const OfflineDataset& dataset, int l, int alpha);

// The "feat-v1" encoder: per-dimension observation mean and standard
// deviation, action one-hot frequency histogram, per-objective reward sums,
// and window length / l. Deterministic and insensitive to step order inside
// the window, which is a stated limitation of this encoder.
Embedding encode(const Trajectory& parent, const SubTrajectory& window,
                 const std::string& encoder_id, int action_count, int l);

std::vector<Embedding> encode_dataset(const OfflineDataset& dataset,
                                      const std::vector<SubTrajectory>& windows,
                                      const std::string& encoder_id, int action_count, int l);

// Window -> cluster assignment used for dataset filtering.
struct WindowAssignment {
    SubTrajectory window;
    int cluster = 0;
};

// Removes the excluded cluster from the dataset. With episode granularity,
// any episode containing at least one excluded window is dropped whole. With
// window granularity only the excluded windows' steps are dropped; surviving
// contiguous runs are re-emitted as trajectory fragments that keep their
// episode id.
OfflineDataset filter_dataset(const OfflineDataset& dataset,
                              const std::vector<WindowAssignment>& assignments, int excluded_cluster,
                              ExclusionGranularity granularity = ExclusionGranularity::episode);

// Line-delimited JSON dataset serialization: a header record carrying
// preference, seed, env name and format version, then one record per step.
void save_dataset_jsonl(const OfflineDataset& dataset, const std::string& env_name,
                        std::uint64_t seed, const std::string& path);

struct LoadedDataset {
    OfflineDataset dataset;
    std::string env_name;
    std::uint64_t seed = 0;
};

LoadedDataset load_dataset_jsonl(const std::string& path);

}  // namespace trex
