#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trex/core.hpp"

namespace trex {

struct KRange {
    int lo = 2;
    int hi = 8;
};

struct LearnerConfig {
    double learning_rate = 0.2;
    double discount = 0.97;
    // Online Q-learning budget for the expert.
    int training_steps = 300000;
    // Offline fitted-Q budget, shared by the original and every complementary
    // policy so return deviations are attributable to the data alone.
    int offline_updates = 300000;
    double train_epsilon = 0.25;
    int checkpoint_every = 500;
    int eval_episodes = 1;
    double optimistic_init = 0.0;
    // Expert gate: best greedy scalarized return must be within this fraction
    // of the value-iteration optimum.
    double expert_min_fraction = 0.95;
    // Observation dimensions used to build the tabular state key. Empty means
    // all dimensions.
    std::vector<int> state_key_dims;
};

enum class ExclusionGranularity {
    episode,  // drop every episode touching the excluded cluster
    window,   // drop only the excluded windows' transitions
};

struct PipelineConfig {
    std::string env_name = "mo-corridor";
    std::string dst_grid_path;  // only used by deep-sea-treasure
    std::string config_dir;     // directory of the config file; resolves relative paths
    std::vector<PreferenceVector> preference_set;
    int m = 25;
    int T = 500;
    double epsilon = 0.05;
    int l = 20;
    int alpha = 5;
    std::optional<KRange> k_range;  // defaulted from the embedding count when absent
    std::uint64_t seed = 42;
    std::string encoder_id = "feat-v1";
    LearnerConfig learner;
    ExclusionGranularity exclusion = ExclusionGranularity::episode;
    int representatives_per_cluster = 3;
    int workers = 4;

    // Throws ConfigError on invariant violations (epsilon range, alpha < l, ...).
    void validate() const;
};

PipelineConfig load_config(const std::string& path);
PipelineConfig parse_config(const std::string& json_text);
std::string config_to_json(const PipelineConfig& config);

// Default k range used when the config leaves it unset: [2, min(8, floor(sqrt(count)))].
KRange default_k_range(std::size_t embedding_count);

}  // namespace trex
