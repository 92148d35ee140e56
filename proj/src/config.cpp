#include "trex/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace trex {

using nlohmann::json;

void PipelineConfig::validate() const {
    if (env_name.empty()) {
        throw Error(ErrorCode::config_error, "env name must be set");
    }
    if (preference_set.empty()) {
        throw Error(ErrorCode::config_error, "preference_set must be non-empty");
    }
    if (m < 1) {
        throw Error(ErrorCode::config_error, "m must be >= 1");
    }
    if (T < 1) {
        throw Error(ErrorCode::config_error, "T must be >= 1");
    }
    if (epsilon < 0.0 || epsilon > 1.0) {
        throw Error(ErrorCode::config_error, "epsilon must be in [0, 1]");
    }
    if (l < 2) {
        throw Error(ErrorCode::config_error, "window length l must be >= 2");
    }
    if (alpha < 0 || alpha >= l) {
        throw Error(ErrorCode::config_error, "overlap alpha must satisfy 0 <= alpha < l");
    }
    if (k_range && (k_range->lo < 2 || k_range->hi < k_range->lo)) {
        throw Error(ErrorCode::config_error, "k_range must satisfy 2 <= lo <= hi");
    }
    if (learner.learning_rate <= 0.0 || learner.learning_rate > 1.0) {
        throw Error(ErrorCode::config_error, "learning_rate must be in (0, 1]");
    }
    if (learner.discount < 0.0 || learner.discount > 1.0) {
        throw Error(ErrorCode::config_error, "discount must be in [0, 1]");
    }
    if (learner.training_steps < 1 || learner.offline_updates < 1) {
        throw Error(ErrorCode::config_error, "training budgets must be >= 1");
    }
    if (learner.checkpoint_every < 1) {
        throw Error(ErrorCode::config_error, "checkpoint_every must be >= 1");
    }
    if (representatives_per_cluster < 1) {
        throw Error(ErrorCode::config_error, "representatives_per_cluster must be >= 1");
    }
    if (workers < 1) {
        throw Error(ErrorCode::config_error, "workers must be >= 1");
    }
}

KRange default_k_range(std::size_t embedding_count) {
    int hi = static_cast<int>(std::floor(std::sqrt(static_cast<double>(embedding_count))));
    hi = std::min(hi, 8);
    hi = std::max(hi, 2);
    return KRange{2, hi};
}

namespace {

LearnerConfig parse_learner(const json& j) {
    LearnerConfig lc;
    lc.learning_rate = j.value("learning_rate", lc.learning_rate);
    lc.discount = j.value("discount", lc.discount);
    lc.training_steps = j.value("training_steps", lc.training_steps);
    lc.offline_updates = j.value("offline_updates", lc.offline_updates);
    lc.train_epsilon = j.value("train_epsilon", lc.train_epsilon);
    lc.checkpoint_every = j.value("checkpoint_every", lc.checkpoint_every);
    lc.eval_episodes = j.value("eval_episodes", lc.eval_episodes);
    lc.optimistic_init = j.value("optimistic_init", lc.optimistic_init);
    lc.expert_min_fraction = j.value("expert_min_fraction", lc.expert_min_fraction);
    if (j.contains("state_key_dims")) {
        lc.state_key_dims = j.at("state_key_dims").get<std::vector<int>>();
    }
    return lc;
}

json learner_to_json(const LearnerConfig& lc) {
    json j;
    j["learning_rate"] = lc.learning_rate;
    j["discount"] = lc.discount;
    j["training_steps"] = lc.training_steps;
    j["offline_updates"] = lc.offline_updates;
    j["train_epsilon"] = lc.train_epsilon;
    j["checkpoint_every"] = lc.checkpoint_every;
    j["eval_episodes"] = lc.eval_episodes;
    j["optimistic_init"] = lc.optimistic_init;
    j["expert_min_fraction"] = lc.expert_min_fraction;
    if (!lc.state_key_dims.empty()) {
        j["state_key_dims"] = lc.state_key_dims;
    }
    return j;
}

}  // namespace

PipelineConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::config_error, std::string("invalid config JSON: ") + e.what());
    }

    PipelineConfig config;
    try {
        config.env_name = j.value("env", config.env_name);
        config.dst_grid_path = j.value("dst_grid_path", config.dst_grid_path);
        if (j.contains("preferences")) {
            for (const auto& p : j.at("preferences")) {
                config.preference_set.push_back(validate_preference(p.get<std::vector<double>>()));
            }
        }
        config.m = j.value("m", config.m);
        config.T = j.value("T", config.T);
        config.epsilon = j.value("epsilon", config.epsilon);
        config.l = j.value("l", config.l);
        config.alpha = j.value("alpha", config.alpha);
        if (j.contains("k_range")) {
            auto range = j.at("k_range").get<std::vector<int>>();
            if (range.size() != 2) {
                throw Error(ErrorCode::config_error, "k_range must be [lo, hi]");
            }
            config.k_range = KRange{range[0], range[1]};
        }
        config.seed = j.value("seed", config.seed);
        config.encoder_id = j.value("encoder", config.encoder_id);
        if (j.contains("learner")) {
            config.learner = parse_learner(j.at("learner"));
        }
        std::string exclusion = j.value("exclusion", "episode");
        if (exclusion == "episode") {
            config.exclusion = ExclusionGranularity::episode;
        } else if (exclusion == "window") {
            config.exclusion = ExclusionGranularity::window;
        } else {
            throw Error(ErrorCode::config_error, "exclusion must be 'episode' or 'window'");
        }
        config.representatives_per_cluster =
            j.value("representatives_per_cluster", config.representatives_per_cluster);
        config.workers = j.value("workers", config.workers);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::config_error, std::string("bad config field: ") + e.what());
    }

    config.validate();
    return config;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::io_failure, "cannot open config file " + path);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    PipelineConfig config = parse_config(buffer.str());
    std::filesystem::path dir = std::filesystem::path(path).parent_path();
    config.config_dir = dir.empty() ? "." : dir.string();
    return config;
}

std::string config_to_json(const PipelineConfig& config) {
    json j;
    j["env"] = config.env_name;
    if (!config.dst_grid_path.empty()) {
        j["dst_grid_path"] = config.dst_grid_path;
    }
    json prefs = json::array();
    for (const auto& p : config.preference_set) {
        prefs.push_back(p.weights);
    }
    j["preferences"] = prefs;
    j["m"] = config.m;
    j["T"] = config.T;
    j["epsilon"] = config.epsilon;
    j["l"] = config.l;
    j["alpha"] = config.alpha;
    if (config.k_range) {
        j["k_range"] = std::vector<int>{config.k_range->lo, config.k_range->hi};
    }
    j["seed"] = config.seed;
    j["encoder"] = config.encoder_id;
    j["learner"] = learner_to_json(config.learner);
    j["exclusion"] = config.exclusion == ExclusionGranularity::episode ? "episode" : "window";
    j["representatives_per_cluster"] = config.representatives_per_cluster;
    j["workers"] = config.workers;
    return j.dump(2);
}

}  // namespace trex
