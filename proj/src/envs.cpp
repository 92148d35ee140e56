#include "trex/envs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace trex {

std::vector<double> EnvState::reset(std::uint64_t seed) {
    seed_ = seed;
    state_ = env_->initial_state();
    step_ = 0;
    done_ = false;
    return env_->observation(state_, step_);
}

EnvState::StepResult EnvState::step(int action) {
    if (done_) {
        throw Error(ErrorCode::episode_finished, "step called after episode end");
    }
    if (action < 0 || action >= env_->spec().action_count) {
        throw Error(ErrorCode::invalid_action, "action " + std::to_string(action) + " out of range");
    }
    Transition tr = env_->transition(state_, action);
    state_ = tr.next_state;
    ++step_;
    StepResult result;
    result.observation = env_->observation(state_, step_);
    result.reward = tr.reward;
    result.terminal = tr.terminal;
    result.truncated = !tr.terminal && step_ >= env_->spec().max_steps;
    done_ = result.terminal || result.truncated;
    return result;
}

// ---------------------------------------------------------------------------
// MO-Corridor

MoCorridor::MoCorridor() {
    spec_.name = "mo-corridor";
    spec_.observation_dim = 3;
    spec_.action_count = 3;
    spec_.objective_count = 2;
    spec_.max_steps = kMaxSteps;
}

Transition MoCorridor::transition(int state, int action) const {
    if (state < 0 || state > kTrackCells) {
        throw Error(ErrorCode::invalid_action, "corridor state out of range");
    }
    int gain = 0;
    double cost = 0.0;
    switch (action) {
        case kWalk:
            gain = 1;
            cost = kWalkCost;
            break;
        case kSprint:
            gain = 2;
            cost = is_smooth(state) ? kSprintCostSmooth : kSprintCostRough;
            break;
        case kRest:
            gain = 0;
            cost = kRestCost;
            break;
        default:
            throw Error(ErrorCode::invalid_action, "corridor action out of range");
    }
    int next = std::min(state + gain, kTrackCells);
    Transition tr;
    tr.next_state = next;
    tr.reward.values = {static_cast<double>(next - state), -cost};
    tr.terminal = next >= kTrackCells;
    return tr;
}

std::vector<double> MoCorridor::observation(int state, int step) const {
    return {static_cast<double>(state) / kTrackCells,
            static_cast<double>(step) / kMaxSteps,
            is_smooth(std::min(state, kTrackCells - 1)) ? 1.0 : 0.0};
}

// ---------------------------------------------------------------------------
// Deep Sea Treasure

DeepSeaTreasure::DeepSeaTreasure(std::vector<std::vector<double>> grid, int max_steps)
    : grid_(std::move(grid)) {
    rows_ = static_cast<int>(grid_.size());
    if (rows_ == 0) {
        throw Error(ErrorCode::schema_error, "empty treasure grid");
    }
    cols_ = static_cast<int>(grid_[0].size());
    for (const auto& row : grid_) {
        if (static_cast<int>(row.size()) != cols_) {
            throw Error(ErrorCode::schema_error, "ragged treasure grid");
        }
    }
    if (blocked(0, 0)) {
        throw Error(ErrorCode::schema_error, "start cell must be open water");
    }
    spec_.name = "deep-sea-treasure";
    spec_.observation_dim = 3;
    spec_.action_count = 4;
    spec_.objective_count = 2;
    spec_.max_steps = max_steps;
}

bool DeepSeaTreasure::blocked(int row, int col) const {
    if (row < 0 || row >= rows_ || col < 0 || col >= cols_) {
        return true;
    }
    return std::isnan(grid_[row][col]);
}

DeepSeaTreasure DeepSeaTreasure::from_file(const std::string& path, int max_steps) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::io_failure, "cannot open treasure grid " + path);
    }
    std::vector<std::vector<double>> grid;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream row_in(line);
        std::vector<double> row;
        std::string token;
        while (row_in >> token) {
            if (token == ".") {
                row.push_back(0.0);
            } else if (token == "#") {
                row.push_back(std::nan(""));
            } else {
                try {
                    row.push_back(std::stod(token));
                } catch (const std::exception&) {
                    throw Error(ErrorCode::schema_error, "bad grid token '" + token + "' in " + path);
                }
            }
        }
        if (!row.empty()) {
            grid.push_back(std::move(row));
        }
    }
    return DeepSeaTreasure(std::move(grid), max_steps);
}

Transition DeepSeaTreasure::transition(int state, int action) const {
    int row = state / cols_;
    int col = state % cols_;
    int next_row = row;
    int next_col = col;
    switch (action) {
        case kUp: next_row = row - 1; break;
        case kDown: next_row = row + 1; break;
        case kLeft: next_col = col - 1; break;
        case kRight: next_col = col + 1; break;
        default:
            throw Error(ErrorCode::invalid_action, "treasure action out of range");
    }
    if (blocked(next_row, next_col)) {
        next_row = row;
        next_col = col;
    }
    double treasure = grid_[next_row][next_col];
    Transition tr;
    tr.next_state = next_row * cols_ + next_col;
    tr.reward.values = {treasure, -1.0};
    tr.terminal = treasure > 0.0;
    return tr;
}

std::vector<double> DeepSeaTreasure::observation(int state, int step) const {
    int row = state / cols_;
    int col = state % cols_;
    return {static_cast<double>(row) / (rows_ - 1),
            static_cast<double>(col) / (cols_ - 1),
            static_cast<double>(step) / spec_.max_steps};
}

std::unique_ptr<Env> make_env(const std::string& name, const std::string& dst_grid_path) {
    if (name == "mo-corridor") {
        return std::make_unique<MoCorridor>();
    }
    if (name == "deep-sea-treasure") {
        if (dst_grid_path.empty()) {
            throw Error(ErrorCode::config_error, "deep-sea-treasure requires dst_grid_path");
        }
        return std::make_unique<DeepSeaTreasure>(DeepSeaTreasure::from_file(dst_grid_path));
    }
    throw Error(ErrorCode::config_error, "unknown environment '" + name + "'");
}

// ---------------------------------------------------------------------------
// Value-iteration oracle: exact backward induction over (state, step).

namespace {

struct OptimalPlan {
    double value = 0.0;
    // greedy action per (step * state_count + state)
    std::vector<int> actions;
};

OptimalPlan backward_induction(const Env& env, const PreferenceVector& pref) {
    const EnvSpec& spec = env.spec();
    if (static_cast<std::size_t>(pref.objectives()) != static_cast<std::size_t>(spec.objective_count)) {
        throw Error(ErrorCode::dimension_mismatch, "preference does not match objective count");
    }
    const long long states = env.state_count();
    const long long horizon = spec.max_steps;
    if (states * (horizon + 1) > 50'000'000LL) {
        throw Error(ErrorCode::not_finite, "state-step table too large to enumerate");
    }

    // Cache scalarized one-step models once; transitions are step-independent.
    std::vector<double> reward(states * spec.action_count);
    std::vector<int> next(states * spec.action_count);
    std::vector<char> terminal(states * spec.action_count);
    for (int s = 0; s < states; ++s) {
        for (int a = 0; a < spec.action_count; ++a) {
            Transition tr = env.transition(s, a);
            reward[s * spec.action_count + a] = scalarize(tr.reward, pref);
            next[s * spec.action_count + a] = tr.next_state;
            terminal[s * spec.action_count + a] = tr.terminal ? 1 : 0;
        }
    }

    std::vector<double> value_next(states, 0.0);
    std::vector<double> value(states, 0.0);
    OptimalPlan plan;
    plan.actions.assign(static_cast<std::size_t>(states) * horizon, 0);
    for (int t = static_cast<int>(horizon) - 1; t >= 0; --t) {
        for (int s = 0; s < states; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            int best_action = 0;
            for (int a = 0; a < spec.action_count; ++a) {
                const int idx = s * spec.action_count + a;
                double q = reward[idx];
                if (!terminal[idx]) {
                    q += value_next[next[idx]];
                }
                if (q > best) {
                    best = q;
                    best_action = a;
                }
            }
            value[s] = best;
            plan.actions[static_cast<std::size_t>(t) * states + s] = best_action;
        }
        std::swap(value, value_next);
    }
    plan.value = value_next[env.initial_state()];
    return plan;
}

}  // namespace

VectorReturn optimal_returns(const Env& env, const PreferenceVector& pref) {
    OptimalPlan plan = backward_induction(env, pref);
    const int states = env.state_count();
    VectorReturn total;
    total.values.assign(env.spec().objective_count, 0.0);
    int state = env.initial_state();
    for (int t = 0; t < env.spec().max_steps; ++t) {
        int action = plan.actions[static_cast<std::size_t>(t) * states + state];
        Transition tr = env.transition(state, action);
        total = add(total, tr.reward);
        state = tr.next_state;
        if (tr.terminal) {
            break;
        }
    }
    return total;
}

double optimal_scalarized_return(const Env& env, const PreferenceVector& pref) {
    return backward_induction(env, pref).value;
}

}  // namespace trex
