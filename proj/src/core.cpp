#include "trex/core.hpp"

#include <cmath>
#include <cstdlib>

namespace trex {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::negative_weight: return "NegativeWeight";
        case ErrorCode::sum_not_one: return "SumNotOne";
        case ErrorCode::dimension_mismatch: return "DimensionMismatch";
        case ErrorCode::empty_trajectory: return "EmptyTrajectory";
        case ErrorCode::episode_finished: return "EpisodeFinished";
        case ErrorCode::invalid_action: return "InvalidAction";
        case ErrorCode::not_finite: return "NotFinite";
        case ErrorCode::no_convergence: return "NoConvergence";
        case ErrorCode::empty_dataset: return "EmptyDataset";
        case ErrorCode::unknown_encoder: return "UnknownEncoder";
        case ErrorCode::empty_result: return "EmptyResult";
        case ErrorCode::too_few_points: return "TooFewPoints";
        case ErrorCode::degenerate_clustering: return "DegenerateClustering";
        case ErrorCode::no_clusters: return "NoClusters";
        case ErrorCode::io_failure: return "IoFailure";
        case ErrorCode::missing_episode: return "MissingEpisode";
        case ErrorCode::schema_error: return "SchemaError";
        case ErrorCode::stale_input: return "StaleInput";
        case ErrorCode::config_error: return "ConfigError";
    }
    return "UnknownError";
}

PreferenceVector validate_preference(const std::vector<double>& weights) {
    double sum = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w)) {
            throw Error(ErrorCode::sum_not_one, "non-finite weight");
        }
        if (w < 0.0) {
            throw Error(ErrorCode::negative_weight,
                        "preference weights must be non-negative, got " + std::to_string(w));
        }
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
        throw Error(ErrorCode::sum_not_one,
                    "preference weights sum to " + std::to_string(sum) + ", expected 1");
    }
    PreferenceVector pref;
    pref.weights.reserve(weights.size());
    for (double w : weights) {
        pref.weights.push_back(w / sum);
    }
    return pref;
}

double scalarize(const VectorReturn& r, const PreferenceVector& pref) {
    if (r.size() != pref.objectives()) {
        throw Error(ErrorCode::dimension_mismatch,
                    "return has " + std::to_string(r.size()) + " objectives, preference has " +
                        std::to_string(pref.objectives()));
    }
    double out = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        out += pref.weights[i] * r.values[i];
    }
    return out;
}

VectorReturn cumulative_return(const Trajectory& t) {
    if (t.steps.empty()) {
        throw Error(ErrorCode::empty_trajectory, "cannot sum returns of an empty trajectory");
    }
    VectorReturn total;
    total.values.assign(t.steps.front().reward.size(), 0.0);
    for (const Step& step : t.steps) {
        if (step.reward.size() != total.size()) {
            throw Error(ErrorCode::dimension_mismatch, "inconsistent reward dimension in trajectory");
        }
        for (std::size_t i = 0; i < total.size(); ++i) {
            total.values[i] += step.reward.values[i];
        }
    }
    return total;
}

VectorReturn add(const VectorReturn& a, const VectorReturn& b) {
    if (a.size() != b.size()) {
        throw Error(ErrorCode::dimension_mismatch, "vector return size mismatch");
    }
    VectorReturn out = a;
    for (std::size_t i = 0; i < b.size(); ++i) {
        out.values[i] += b.values[i];
    }
    return out;
}

VectorReturn scale(const VectorReturn& a, double factor) {
    VectorReturn out = a;
    for (double& v : out.values) {
        v *= factor;
    }
    return out;
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::uint64_t seed_mix(std::initializer_list<std::uint64_t> words) {
    std::uint64_t state = 0x6a09e667f3bcc908ULL;
    std::uint64_t out = 0;
    for (std::uint64_t w : words) {
        state ^= w;
        out = splitmix64(state);
    }
    return out;
}

}  // namespace trex
