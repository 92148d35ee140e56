#include "trex/agents.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace trex {

std::string state_key(const std::vector<double>& observation, const std::vector<int>& dims) {
    std::string key;
    char buf[32];
    auto append = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.6f", v);
        if (!key.empty()) {
            key.push_back(',');
        }
        key += buf;
    };
    if (dims.empty()) {
        for (double v : observation) {
            append(v);
        }
    } else {
        for (int d : dims) {
            if (d < 0 || static_cast<std::size_t>(d) >= observation.size()) {
                throw Error(ErrorCode::dimension_mismatch, "state key dimension out of range");
            }
            append(observation[d]);
        }
    }
    return key;
}

const char* to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::expert: return "expert";
        case PolicyKind::original: return "original";
        case PolicyKind::complementary: return "complementary";
    }
    return "unknown";
}

std::optional<int> Policy::greedy(const std::string& key) const {
    auto it = q_table.find(key);
    if (it == q_table.end()) {
        return std::nullopt;
    }
    const StateValues& sv = it->second;
    int best = -1;
    double best_q = 0.0;
    for (int a = 0; a < static_cast<int>(sv.q.size()); ++a) {
        if (!sv.seen[a]) {
            continue;
        }
        if (best < 0 || sv.q[a] > best_q) {
            best = a;
            best_q = sv.q[a];
        }
    }
    if (best < 0) {
        return std::nullopt;
    }
    return best;
}

std::size_t OfflineDataset::step_count() const {
    std::size_t n = 0;
    for (const auto& t : trajectories) {
        n += t.steps.size();
    }
    return n;
}

std::vector<DatasetTransition> extract_transitions(const OfflineDataset& dataset,
                                                   const std::vector<int>& state_key_dims) {
    std::vector<DatasetTransition> out;
    out.reserve(dataset.step_count());
    for (const Trajectory& traj : dataset.trajectories) {
        for (std::size_t i = 0; i < traj.steps.size(); ++i) {
            const Step& step = traj.steps[i];
            DatasetTransition tr;
            tr.state = state_key(step.observation, state_key_dims);
            tr.action = step.action;
            tr.reward = step.reward;
            tr.terminal = step.terminal;
            if (step.terminal) {
                out.push_back(std::move(tr));
            } else if (i + 1 < traj.steps.size()) {
                tr.next_state = state_key(traj.steps[i + 1].observation, state_key_dims);
                out.push_back(std::move(tr));
            }
            // A truncated tail step has no successor observation to bootstrap
            // from, so it is dropped.
        }
    }
    return out;
}

int act(const Policy& policy, const std::vector<double>& observation, double epsilon, Rng& rng,
        ActStats* stats) {
    if (epsilon > 0.0 && rng.uniform() < epsilon) {
        if (stats) {
            ++stats->random_actions;
        }
        return static_cast<int>(rng.uniform_int(static_cast<std::uint32_t>(policy.action_count)));
    }
    std::optional<int> action = policy.greedy(state_key(observation, policy.state_key_dims));
    if (!action) {
        if (stats) {
            ++stats->unknown_states;
            ++stats->random_actions;
        }
        return static_cast<int>(rng.uniform_int(static_cast<std::uint32_t>(policy.action_count)));
    }
    return *action;
}

VectorReturn evaluate(const Policy& policy, const Env& env, int episodes, std::uint64_t seed,
                      ActStats* stats) {
    if (episodes < 1) {
        throw Error(ErrorCode::config_error, "evaluate needs episodes >= 1");
    }
    VectorReturn total;
    total.values.assign(env.spec().objective_count, 0.0);
    for (int ep = 0; ep < episodes; ++ep) {
        Rng rng(seed_mix({seed, fnv1a64("eval-episode"), static_cast<std::uint64_t>(ep)}));
        EnvState rollout(env);
        std::vector<double> obs = rollout.reset(rng.next_u64());
        while (!rollout.done()) {
            int action = act(policy, obs, 0.0, rng, stats);
            EnvState::StepResult res = rollout.step(action);
            total = add(total, res.reward);
            obs = res.observation;
        }
    }
    return scale(total, 1.0 / episodes);
}

namespace {

// Shared tabular learner state for the online and offline trainers.
struct QLearner {
    Policy policy;
    double lr;
    double gamma;

    QLearner(PolicyKind kind, const Env& env, const PreferenceVector& pref,
             const LearnerConfig& learner, std::uint64_t seed)
        : lr(learner.learning_rate), gamma(learner.discount) {
        policy.kind = kind;
        policy.env_name = env.spec().name;
        policy.preference = pref;
        policy.training_seed = seed;
        policy.action_count = env.spec().action_count;
        policy.state_key_dims = learner.state_key_dims;
    }

    StateValues& state(const std::string& key, double init, bool mark_seen) {
        auto [it, inserted] = policy.q_table.try_emplace(key);
        if (inserted) {
            it->second.q.assign(policy.action_count, init);
            it->second.seen.assign(policy.action_count, mark_seen ? 1 : 0);
        }
        return it->second;
    }

    double max_seen_q(const std::string& key) const {
        auto it = policy.q_table.find(key);
        if (it == policy.q_table.end()) {
            return 0.0;
        }
        double best = 0.0;
        bool any = false;
        for (int a = 0; a < policy.action_count; ++a) {
            if (!it->second.seen[a]) {
                continue;
            }
            if (!any || it->second.q[a] > best) {
                best = it->second.q[a];
                any = true;
            }
        }
        return any ? best : 0.0;
    }
};

struct Checkpoint {
    double scalar = -std::numeric_limits<double>::infinity();
    std::unordered_map<std::string, StateValues> q_table;
};

void maybe_checkpoint(QLearner& learner, const Env& env, const LearnerConfig& config,
                      std::uint64_t eval_seed, Checkpoint& best) {
    VectorReturn returns = evaluate(learner.policy, env, config.eval_episodes, eval_seed);
    double scalar = scalarize(returns, learner.policy.preference);
    if (scalar > best.scalar) {
        best.scalar = scalar;
        best.q_table = learner.policy.q_table;
    }
}

}  // namespace

Policy train_expert(const Env& env, const PreferenceVector& pref, const LearnerConfig& learner,
                    std::uint64_t seed) {
    QLearner q(PolicyKind::expert, env, pref, learner, seed);
    Checkpoint best;
    const std::uint64_t eval_seed = seed_mix({seed, fnv1a64("expert-eval")});

    Rng rng(seed_mix({seed, fnv1a64("expert-train")}));
    int updates = 0;
    int episode = 0;
    while (updates < learner.training_steps) {
        EnvState rollout(env);
        std::vector<double> obs = rollout.reset(
            seed_mix({seed, fnv1a64("expert-episode"), static_cast<std::uint64_t>(episode)}));
        ++episode;
        while (!rollout.done() && updates < learner.training_steps) {
            std::string key = state_key(obs, learner.state_key_dims);
            StateValues& sv = q.state(key, learner.optimistic_init, true);
            int action;
            if (rng.uniform() < learner.train_epsilon) {
                action = static_cast<int>(rng.uniform_int(env.spec().action_count));
            } else {
                action = 0;
                for (int a = 1; a < env.spec().action_count; ++a) {
                    if (sv.q[a] > sv.q[action]) {
                        action = a;
                    }
                }
            }
            EnvState::StepResult res = rollout.step(action);
            double target = scalarize(res.reward, pref);
            if (!res.terminal) {
                // Bootstrapping continues through step-limit truncation.
                std::string next_key = state_key(res.observation, learner.state_key_dims);
                StateValues& next_sv = q.state(next_key, learner.optimistic_init, true);
                double next_max = *std::max_element(next_sv.q.begin(), next_sv.q.end());
                target += q.gamma * next_max;
            }
            StateValues& sv_again = q.policy.q_table.at(key);
            sv_again.q[action] += q.lr * (target - sv_again.q[action]);
            sv_again.seen[action] = 1;
            obs = res.observation;
            ++updates;
            if (updates % learner.checkpoint_every == 0) {
                maybe_checkpoint(q, env, learner, eval_seed, best);
            }
        }
    }
    maybe_checkpoint(q, env, learner, eval_seed, best);

    double optimum = optimal_scalarized_return(env, pref);
    double floor = optimum - (1.0 - learner.expert_min_fraction) * std::abs(optimum);
    if (best.scalar < floor) {
        std::ostringstream msg;
        msg << "expert reached " << best.scalar << " but the oracle optimum is " << optimum;
        throw Error(ErrorCode::no_convergence, msg.str());
    }
    q.policy.q_table = std::move(best.q_table);
    return std::move(q.policy);
}

Policy train_offline(const OfflineDataset& dataset, const PreferenceVector& pref,
                     const LearnerConfig& learner, std::uint64_t seed, const Env& env,
                     std::optional<int> excluded_cluster,
                     const std::function<void(const DatasetTransition&)>& on_update) {
    if (dataset.trajectories.empty()) {
        throw Error(ErrorCode::empty_dataset, "offline dataset has no trajectories");
    }
    std::vector<DatasetTransition> transitions = extract_transitions(dataset, learner.state_key_dims);
    if (transitions.empty()) {
        throw Error(ErrorCode::empty_dataset, "offline dataset has no usable transitions");
    }

    QLearner q(excluded_cluster ? PolicyKind::complementary : PolicyKind::original, env, pref,
               learner, seed);
    q.policy.excluded_cluster = excluded_cluster;
    Checkpoint best;
    const std::uint64_t eval_seed = seed_mix({seed, fnv1a64("offline-eval")});

    int updates = 0;
    while (updates < learner.offline_updates) {
        for (const DatasetTransition& tr : transitions) {
            double target = scalarize(tr.reward, pref);
            if (!tr.terminal) {
                target += q.gamma * q.max_seen_q(tr.next_state);
            }
            StateValues& sv = q.state(tr.state, 0.0, false);
            sv.q[tr.action] += q.lr * (target - sv.q[tr.action]);
            sv.seen[tr.action] = 1;
            if (on_update) {
                on_update(tr);
            }
            ++updates;
            if (updates % learner.checkpoint_every == 0) {
                maybe_checkpoint(q, env, learner, eval_seed, best);
            }
            if (updates >= learner.offline_updates) {
                break;
            }
        }
    }
    maybe_checkpoint(q, env, learner, eval_seed, best);
    q.policy.q_table = std::move(best.q_table);
    return std::move(q.policy);
}

void save_policy(const Policy& policy, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::io_failure, "cannot write policy file " + path);
    }
    out << "trex-policy v1\n";
    out << "kind " << to_string(policy.kind) << "\n";
    out << "env " << policy.env_name << "\n";
    out << "action_count " << policy.action_count << "\n";
    out << "preference";
    char buf[32];
    for (double w : policy.preference.weights) {
        std::snprintf(buf, sizeof(buf), " %.17g", w);
        out << buf;
    }
    out << "\n";
    out << "seed " << policy.training_seed << "\n";
    out << "state_key_dims";
    for (int d : policy.state_key_dims) {
        out << " " << d;
    }
    out << "\n";
    out << "excluded_cluster " << (policy.excluded_cluster ? std::to_string(*policy.excluded_cluster) : "-")
        << "\n";

    std::map<std::string, const StateValues*> ordered;
    for (const auto& [key, sv] : policy.q_table) {
        ordered.emplace(key, &sv);
    }
    std::size_t entries = 0;
    for (const auto& [key, sv] : ordered) {
        for (int a = 0; a < policy.action_count; ++a) {
            if (sv->seen[a]) {
                ++entries;
            }
        }
    }
    out << "entries " << entries << "\n";
    for (const auto& [key, sv] : ordered) {
        for (int a = 0; a < policy.action_count; ++a) {
            if (!sv->seen[a]) {
                continue;
            }
            std::snprintf(buf, sizeof(buf), "%.17g", sv->q[a]);
            out << key << " " << a << " " << buf << "\n";
        }
    }
    if (!out) {
        throw Error(ErrorCode::io_failure, "failed writing policy file " + path);
    }
}

Policy load_policy(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::io_failure, "cannot open policy file " + path);
    }
    std::string line;
    if (!std::getline(in, line) || line != "trex-policy v1") {
        throw Error(ErrorCode::schema_error, "unsupported policy file format in " + path);
    }
    Policy policy;
    std::size_t entries = 0;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string field;
        ls >> field;
        if (field == "kind") {
            std::string kind;
            ls >> kind;
            if (kind == "expert") {
                policy.kind = PolicyKind::expert;
            } else if (kind == "original") {
                policy.kind = PolicyKind::original;
            } else if (kind == "complementary") {
                policy.kind = PolicyKind::complementary;
            } else {
                throw Error(ErrorCode::schema_error, "unknown policy kind " + kind);
            }
        } else if (field == "env") {
            ls >> policy.env_name;
        } else if (field == "action_count") {
            ls >> policy.action_count;
        } else if (field == "preference") {
            double w;
            std::vector<double> weights;
            while (ls >> w) {
                weights.push_back(w);
            }
            policy.preference = validate_preference(weights);
        } else if (field == "seed") {
            ls >> policy.training_seed;
        } else if (field == "state_key_dims") {
            int d;
            while (ls >> d) {
                policy.state_key_dims.push_back(d);
            }
        } else if (field == "excluded_cluster") {
            std::string value;
            ls >> value;
            if (value != "-") {
                policy.excluded_cluster = std::stoi(value);
            }
        } else if (field == "entries") {
            ls >> entries;
            break;
        } else {
            throw Error(ErrorCode::schema_error, "unknown policy field " + field);
        }
    }
    for (std::size_t i = 0; i < entries; ++i) {
        if (!std::getline(in, line)) {
            throw Error(ErrorCode::schema_error, "truncated policy file " + path);
        }
        std::istringstream ls(line);
        std::string key;
        int action;
        double value;
        if (!(ls >> key >> action >> value)) {
            throw Error(ErrorCode::schema_error, "bad policy entry: " + line);
        }
        auto [it, inserted] = policy.q_table.try_emplace(key);
        if (inserted) {
            it->second.q.assign(policy.action_count, 0.0);
            it->second.seen.assign(policy.action_count, 0);
        }
        it->second.q[action] = value;
        it->second.seen[action] = 1;
    }
    return policy;
}

}  // namespace trex
