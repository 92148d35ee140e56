#pragma once

#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// Core domain types shared by the whole pipeline. Everything here is a plain
// value type, immutable after construction, and safe to share across threads.

namespace trex {

enum class ErrorCode {
    negative_weight,
    sum_not_one,
    dimension_mismatch,
    empty_trajectory,
    episode_finished,
    invalid_action,
    not_finite,
    no_convergence,
    empty_dataset,
    unknown_encoder,
    empty_result,
    too_few_points,
    degenerate_clustering,
    no_clusters,
    io_failure,
    missing_episode,
    schema_error,
    stale_input,
    config_error,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

// User preference over objectives: non-negative weights summing to 1.
struct PreferenceVector {
    std::vector<double> weights;

    std::size_t objectives() const { return weights.size(); }
};

// Per-objective cumulative (or per-step) reward vector.
struct VectorReturn {
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
};

struct Step {
    std::vector<double> observation;
    int action = 0;
    VectorReturn reward;
    bool terminal = false;
};

struct Trajectory {
    int episode_id = 0;
    PreferenceVector preference;
    std::vector<Step> steps;
    std::uint64_t seed = 0;

    std::size_t length() const { return steps.size(); }
};

// Validates and normalizes raw weights. Weights within 1e-6 of summing to 1
// are renormalized; larger deviations are rejected.
PreferenceVector validate_preference(const std::vector<double>& weights);

// Weighted sum of per-objective returns.
double scalarize(const VectorReturn& r, const PreferenceVector& pref);

// Element-wise sum of step reward vectors over the whole trajectory.
VectorReturn cumulative_return(const Trajectory& t);

VectorReturn add(const VectorReturn& a, const VectorReturn& b);
VectorReturn scale(const VectorReturn& a, double factor);

// ---------------------------------------------------------------------------
// Deterministic RNG and seed derivation. All randomness in the pipeline flows
// from a single master seed through seed_mix, never from ambient entropy.

std::uint64_t splitmix64(std::uint64_t& state);
std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t seed_mix(std::initializer_list<std::uint64_t> words);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n).
    std::uint32_t uniform_int(std::uint32_t n) {
        return static_cast<std::uint32_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

private:
    std::uint64_t state_;
};

}  // namespace trex
