#include "trex/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <tuple>

#include <json.hpp>

namespace trex {

using nlohmann::json;

OfflineDataset sample_dataset(const Policy& policy, const Env& env, const PreferenceVector& pref,
                              int m, int T, double epsilon, std::uint64_t seed) {
    if (m < 1 || T < 1) {
        throw Error(ErrorCode::config_error, "sample_dataset needs m >= 1 and T >= 1");
    }
    OfflineDataset dataset;
    dataset.preference = pref;
    dataset.source = OfflineDataset::Source::sampled;
    dataset.trajectories.reserve(m);
    for (int ep = 0; ep < m; ++ep) {
        std::uint64_t episode_seed = seed_mix({seed, fnv1a64("episode"), static_cast<std::uint64_t>(ep)});
        Rng rng(episode_seed);
        Trajectory traj;
        traj.episode_id = ep;
        traj.preference = pref;
        traj.seed = episode_seed;
        EnvState rollout(env);
        std::vector<double> obs = rollout.reset(rng.next_u64());
        for (int t = 0; t < T && !rollout.done(); ++t) {
            Step step;
            step.observation = obs;
            step.action = act(policy, obs, epsilon, rng);
            EnvState::StepResult res = rollout.step(step.action);
            step.reward = res.reward;
            step.terminal = res.terminal;
            traj.steps.push_back(std::move(step));
            obs = res.observation;
        }
        dataset.trajectories.push_back(std::move(traj));
    }
    return dataset;
}

std::vector<SubTrajectory> split(const Trajectory& t, int l, int alpha) {
    if (l < 2) {
        throw Error(ErrorCode::config_error, "window length l must be >= 2");
    }
    if (alpha < 0 || alpha >= l) {
        throw Error(ErrorCode::config_error, "overlap alpha must satisfy 0 <= alpha < l");
    }
    const int len = static_cast<int>(t.steps.size());
    std::vector<SubTrajectory> windows;
    if (len == 0) {
        return windows;
    }
    if (len < l) {
        windows.push_back({t.episode_id, 0, len});
        return windows;
    }
    const int stride = l - alpha;
    int start = 0;
    for (; start + l <= len; start += stride) {
        windows.push_back({t.episode_id, start, start + l});
    }
    if (windows.back().end < len) {
        windows.push_back({t.episode_id, len - l, len});
    }
    return windows;
}

std::vector<SubTrajectory> split_dataset(const OfflineDataset& dataset, int l, int alpha) {
    std::vector<SubTrajectory> windows;
    for (const Trajectory& t : dataset.trajectories) {
        std::vector<SubTrajectory> w = split(t, l, alpha);
        windows.insert(windows.end(), w.begin(), w.end());
    }
    std::sort(windows.begin(), windows.end(), [](const SubTrajectory& a, const SubTrajectory& b) {
        return std::tie(a.episode_id, a.start) < std::tie(b.episode_id, b.start);
    });
    return windows;
}

Embedding encode(const Trajectory& parent, const SubTrajectory& window,
                 const std::string& encoder_id, int action_count, int l) {
    if (encoder_id != "feat-v1") {
        throw Error(ErrorCode::unknown_encoder, "no encoder named '" + encoder_id + "'");
    }
    if (window.start < 0 || window.end > static_cast<int>(parent.steps.size()) ||
        window.start >= window.end) {
        throw Error(ErrorCode::schema_error, "window out of range for its parent trajectory");
    }
    const int n = window.length();
    const std::size_t obs_dim = parent.steps[window.start].observation.size();
    const std::size_t objectives = parent.steps[window.start].reward.size();

    std::vector<double> mean(obs_dim, 0.0);
    std::vector<double> sq(obs_dim, 0.0);
    std::vector<double> action_freq(action_count, 0.0);
    std::vector<double> reward_sum(objectives, 0.0);
    for (int i = window.start; i < window.end; ++i) {
        const Step& step = parent.steps[i];
        if (step.observation.size() != obs_dim || step.reward.size() != objectives) {
            throw Error(ErrorCode::dimension_mismatch, "inconsistent step shapes inside window");
        }
        if (step.action < 0 || step.action >= action_count) {
            throw Error(ErrorCode::invalid_action, "window action outside the declared action count");
        }
        for (std::size_t d = 0; d < obs_dim; ++d) {
            mean[d] += step.observation[d];
            sq[d] += step.observation[d] * step.observation[d];
        }
        action_freq[step.action] += 1.0;
        for (std::size_t k = 0; k < objectives; ++k) {
            reward_sum[k] += step.reward.values[k];
        }
    }

    Embedding emb;
    emb.encoder_id = encoder_id;
    emb.source = window;
    emb.vector.reserve(2 * obs_dim + action_count + objectives + 1);
    for (std::size_t d = 0; d < obs_dim; ++d) {
        emb.vector.push_back(mean[d] / n);
    }
    for (std::size_t d = 0; d < obs_dim; ++d) {
        double variance = sq[d] / n - (mean[d] / n) * (mean[d] / n);
        emb.vector.push_back(std::sqrt(std::max(variance, 0.0)));
    }
    for (int a = 0; a < action_count; ++a) {
        emb.vector.push_back(action_freq[a] / n);
    }
    for (std::size_t k = 0; k < objectives; ++k) {
        emb.vector.push_back(reward_sum[k]);
    }
    emb.vector.push_back(static_cast<double>(n) / l);
    return emb;
}

std::vector<Embedding> encode_dataset(const OfflineDataset& dataset,
                                      const std::vector<SubTrajectory>& windows,
                                      const std::string& encoder_id, int action_count, int l) {
    std::vector<Embedding> out;
    out.reserve(windows.size());
    for (const SubTrajectory& w : windows) {
        const Trajectory* parent = nullptr;
        for (const Trajectory& t : dataset.trajectories) {
            if (t.episode_id == w.episode_id) {
                parent = &t;
                break;
            }
        }
        if (!parent) {
            throw Error(ErrorCode::missing_episode,
                        "window references missing episode " + std::to_string(w.episode_id));
        }
        out.push_back(encode(*parent, w, encoder_id, action_count, l));
    }
    return out;
}

OfflineDataset filter_dataset(const OfflineDataset& dataset,
                              const std::vector<WindowAssignment>& assignments, int excluded_cluster,
                              ExclusionGranularity granularity) {
    OfflineDataset out;
    out.preference = dataset.preference;
    out.source = dataset.source;

    if (granularity == ExclusionGranularity::episode) {
        std::set<int> excluded_episodes;
        for (const WindowAssignment& wa : assignments) {
            if (wa.cluster == excluded_cluster) {
                excluded_episodes.insert(wa.window.episode_id);
            }
        }
        for (const Trajectory& t : dataset.trajectories) {
            if (!excluded_episodes.count(t.episode_id)) {
                out.trajectories.push_back(t);
            }
        }
    } else {
        // Keep a step iff at least one window containing it survives.
        for (const Trajectory& t : dataset.trajectories) {
            std::vector<char> keep(t.steps.size(), 0);
            for (const WindowAssignment& wa : assignments) {
                if (wa.window.episode_id != t.episode_id || wa.cluster == excluded_cluster) {
                    continue;
                }
                for (int i = wa.window.start; i < wa.window.end && i < static_cast<int>(t.steps.size());
                     ++i) {
                    keep[i] = 1;
                }
            }
            std::size_t i = 0;
            while (i < t.steps.size()) {
                if (!keep[i]) {
                    ++i;
                    continue;
                }
                std::size_t run_start = i;
                while (i < t.steps.size() && keep[i]) {
                    ++i;
                }
                Trajectory fragment;
                fragment.episode_id = t.episode_id;
                fragment.preference = t.preference;
                fragment.seed = t.seed;
                fragment.steps.assign(t.steps.begin() + run_start, t.steps.begin() + i);
                out.trajectories.push_back(std::move(fragment));
            }
        }
    }

    if (out.trajectories.empty()) {
        throw Error(ErrorCode::empty_result,
                    "cluster " + std::to_string(excluded_cluster) + " spans the whole dataset");
    }
    return out;
}

void save_dataset_jsonl(const OfflineDataset& dataset, const std::string& env_name,
                        std::uint64_t seed, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::io_failure, "cannot write dataset file " + path);
    }
    json header;
    header["format"] = "trex-dataset-v1";
    header["env"] = env_name;
    header["preference"] = dataset.preference.weights;
    header["seed"] = seed;
    header["episodes"] = dataset.trajectories.size();
    out << header.dump() << "\n";
    for (const Trajectory& t : dataset.trajectories) {
        for (std::size_t i = 0; i < t.steps.size(); ++i) {
            const Step& step = t.steps[i];
            json rec;
            rec["episode"] = t.episode_id;
            rec["t"] = i;
            rec["obs"] = step.observation;
            rec["action"] = step.action;
            rec["reward"] = step.reward.values;
            rec["terminal"] = step.terminal;
            out << rec.dump() << "\n";
        }
    }
    if (!out) {
        throw Error(ErrorCode::io_failure, "failed writing dataset file " + path);
    }
}

LoadedDataset load_dataset_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::io_failure, "cannot open dataset file " + path);
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorCode::schema_error, "empty dataset file " + path);
    }
    LoadedDataset loaded;
    try {
        json header = json::parse(line);
        if (header.value("format", "") != "trex-dataset-v1") {
            throw Error(ErrorCode::schema_error, "unsupported dataset format in " + path);
        }
        loaded.env_name = header.at("env").get<std::string>();
        loaded.seed = header.at("seed").get<std::uint64_t>();
        loaded.dataset.preference =
            validate_preference(header.at("preference").get<std::vector<double>>());
        loaded.dataset.source = OfflineDataset::Source::external;

        Trajectory* current = nullptr;
        while (std::getline(in, line)) {
            if (line.empty()) {
                continue;
            }
            json rec = json::parse(line);
            int episode = rec.at("episode").get<int>();
            if (!current || current->episode_id != episode) {
                Trajectory t;
                t.episode_id = episode;
                t.preference = loaded.dataset.preference;
                loaded.dataset.trajectories.push_back(std::move(t));
                current = &loaded.dataset.trajectories.back();
            }
            Step step;
            step.observation = rec.at("obs").get<std::vector<double>>();
            step.action = rec.at("action").get<int>();
            step.reward.values = rec.at("reward").get<std::vector<double>>();
            step.terminal = rec.at("terminal").get<bool>();
            current->steps.push_back(std::move(step));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::schema_error, std::string("bad dataset record: ") + e.what());
    }
    return loaded;
}

}  // namespace trex
