#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "trex/core.hpp"

namespace trex {

struct EnvSpec {
    std::string name;
    int observation_dim = 0;
    int action_count = 0;
    int objective_count = 0;
    int max_steps = 0;
};

struct Transition {
    int next_state = 0;
    VectorReturn reward;
    bool terminal = false;
};

// A finite, deterministic multi-objective MDP. The full transition model is
// exposed so the value-iteration oracle can enumerate it exactly.
class Env {
public:
    virtual ~Env() = default;

    virtual const EnvSpec& spec() const = 0;
    virtual int state_count() const = 0;
    virtual int initial_state() const = 0;
    virtual Transition transition(int state, int action) const = 0;
    virtual std::vector<double> observation(int state, int step) const = 0;

    virtual std::unique_ptr<Env> clone() const = 0;
};

// Per-episode rollout handle. Single-owner; concurrent rollouts use separate
// instances over cloned envs.
class EnvState {
public:
    explicit EnvState(const Env& env) : env_(&env) {}

    // Returns the initial observation. Identical seeds give identical episodes
    // for identical action sequences.
    std::vector<double> reset(std::uint64_t seed);

    struct StepResult {
        std::vector<double> observation;
        VectorReturn reward;
        bool terminal = false;   // the MDP reached a terminal state
        bool truncated = false;  // the step limit cut the episode short
    };
    StepResult step(int action);

    bool done() const { return done_; }
    int current_step() const { return step_; }
    std::uint64_t seed() const { return seed_; }
    std::vector<double> observation() const { return env_->observation(state_, step_); }

private:
    const Env* env_;
    int state_ = 0;
    int step_ = 0;
    bool done_ = true;
    std::uint64_t seed_ = 0;
};

// MO-Corridor: a 1-D track with alternating rough/smooth terrain blocks.
// Objectives are (distance gained, -energy spent). Walking is steady and
// cheap; sprinting covers two cells per step and its cost depends on terrain,
// so the scalarized optimum changes qualitatively with the preference.
class MoCorridor : public Env {
public:
    static constexpr int kTrackCells = 120;
    static constexpr int kBlockCells = 20;
    static constexpr int kMaxSteps = 60;
    static constexpr int kWalk = 0;
    static constexpr int kSprint = 1;
    static constexpr int kRest = 2;
    static constexpr double kWalkCost = 0.3;
    static constexpr double kSprintCostSmooth = 0.8;
    static constexpr double kSprintCostRough = 1.9;
    static constexpr double kRestCost = 0.05;

    MoCorridor();

    const EnvSpec& spec() const override { return spec_; }
    int state_count() const override { return kTrackCells + 1; }
    int initial_state() const override { return 0; }
    Transition transition(int state, int action) const override;
    std::vector<double> observation(int state, int step) const override;
    std::unique_ptr<Env> clone() const override { return std::make_unique<MoCorridor>(*this); }

    // Block 0 (cells [0, 20)) is rough; terrain alternates every block.
    static bool is_smooth(int position) {
        return ((position / kBlockCells) % 2) == 1;
    }

private:
    EnvSpec spec_;
};

// Deep Sea Treasure on the standard convex 11x10 grid. A submarine starts in
// the top-left corner; each move costs one time unit and entering a treasure
// cell ends the episode. The grid is loaded from a plain-text fixture so the
// map stays auditable.
class DeepSeaTreasure : public Env {
public:
    static constexpr int kUp = 0;
    static constexpr int kDown = 1;
    static constexpr int kLeft = 2;
    static constexpr int kRight = 3;

    // grid[row][col]: NaN = seabed (blocked), 0 = open water, >0 = treasure.
    DeepSeaTreasure(std::vector<std::vector<double>> grid, int max_steps = 100);

    static DeepSeaTreasure from_file(const std::string& path, int max_steps = 100);

    const EnvSpec& spec() const override { return spec_; }
    int state_count() const override { return rows_ * cols_; }
    int initial_state() const override { return 0; }
    Transition transition(int state, int action) const override;
    std::vector<double> observation(int state, int step) const override;
    std::unique_ptr<Env> clone() const override { return std::make_unique<DeepSeaTreasure>(*this); }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double treasure_at(int row, int col) const { return grid_[row][col]; }
    bool blocked(int row, int col) const;

private:
    std::vector<std::vector<double>> grid_;
    int rows_ = 0;
    int cols_ = 0;
    EnvSpec spec_;
};

std::unique_ptr<Env> make_env(const std::string& name, const std::string& dst_grid_path = "");

// Exact per-objective returns of the scalarized-optimal deterministic policy,
// computed by finite-horizon backward induction over (state, step). Ties are
// broken toward the lowest action index. Throws NotFinite when the state-step
// table would be too large to enumerate.
VectorReturn optimal_returns(const Env& env, const PreferenceVector& pref);

// Scalarized value of the optimal policy from the initial state.
double optimal_scalarized_return(const Env& env, const PreferenceVector& pref);

}  // namespace trex
