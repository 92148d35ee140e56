#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "trex/config.hpp"
#include "trex/core.hpp"
#include "trex/envs.hpp"

namespace trex {

// Tabular state key: the selected observation dimensions rendered at fixed
// precision. Empty dims means all dimensions.
std::string state_key(const std::vector<double>& observation, const std::vector<int>& dims);

enum class PolicyKind { expert, original, complementary };

const char* to_string(PolicyKind kind);

struct StateValues {
    std::vector<double> q;
    std::vector<std::uint8_t> seen;  // actions with at least one training update
};

struct Policy {
    PolicyKind kind = PolicyKind::expert;
    std::string env_name;
    PreferenceVector preference;
    std::unordered_map<std::string, StateValues> q_table;
    std::optional<int> excluded_cluster;
    std::uint64_t training_seed = 0;
    int action_count = 0;
    std::vector<int> state_key_dims;

    // Greedy action over actions seen in training; ties break to the lowest
    // action index. Empty when the state was never visited.
    std::optional<int> greedy(const std::string& key) const;
};

struct OfflineDataset {
    enum class Source { sampled, external };

    PreferenceVector preference;
    std::vector<Trajectory> trajectories;
    Source source = Source::sampled;

    std::size_t step_count() const;
};

// One dataset transition as consumed by offline training. Trailing steps of
// truncated episodes have no successor observation and are skipped.
struct DatasetTransition {
    std::string state;
    int action = 0;
    VectorReturn reward;
    std::string next_state;
    bool terminal = false;
};

std::vector<DatasetTransition> extract_transitions(const OfflineDataset& dataset,
                                                   const std::vector<int>& state_key_dims);

struct ActStats {
    std::uint64_t unknown_states = 0;
    std::uint64_t random_actions = 0;
};

// Epsilon-greedy action selection. Unknown states fall back to a uniform
// random action, counted in stats.
int act(const Policy& policy, const std::vector<double>& observation, double epsilon, Rng& rng,
        ActStats* stats = nullptr);

// Mean per-objective return of greedy (epsilon = 0) rollouts.
VectorReturn evaluate(const Policy& policy, const Env& env, int episodes, std::uint64_t seed,
                      ActStats* stats = nullptr);

// Online tabular Q-learning on the scalarized reward. Keeps the checkpoint
// with the best greedy scalarized evaluation return. Throws NoConvergence if
// that best return ends up below learner.expert_min_fraction of the
// value-iteration optimum (measured as distance from the optimum, which keeps
// the gate meaningful for negative-valued optima).
Policy train_expert(const Env& env, const PreferenceVector& pref, const LearnerConfig& learner,
                    std::uint64_t seed);

// Offline fitted-Q iteration over the dataset's transitions, again with
// best-scalarized-return checkpointing. Training updates read only dataset
// transitions; the env is used solely for checkpoint evaluation rollouts.
// The on_update hook observes every applied transition (used by tests to
// verify the no-external-data guarantee).
Policy train_offline(const OfflineDataset& dataset, const PreferenceVector& pref,
                     const LearnerConfig& learner, std::uint64_t seed, const Env& env,
                     std::optional<int> excluded_cluster = std::nullopt,
                     const std::function<void(const DatasetTransition&)>& on_update = nullptr);

// Versioned flat-file policy serialization (state key, action, value triples).
void save_policy(const Policy& policy, const std::string& path);
Policy load_policy(const std::string& path);

}  // namespace trex
