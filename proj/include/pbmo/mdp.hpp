#pragma once

// Finite discounted MDPs with scalar, vector, or symbolic (order-only)
// rewards, together with the policy and history types shared by every
// other module.

#include "pbmo/linalg.hpp"

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

namespace pbmo {

/// Tolerance for probability vectors summing to one.
inline constexpr double kProbabilityTolerance = 1e-12;

struct ScalarReward {
    std::vector<Vector> values; ///< values[s][a]
    bool operator==(const ScalarReward&) const = default;
};

struct VectorReward {
    std::size_t dimension = 0;
    std::vector<std::vector<Vector>> values; ///< values[s][a] has `dimension` entries
    bool operator==(const VectorReward&) const = default;
};

/// Reward known only as one of `labels` unknown values x_1..x_d.
/// Label indices are zero-based in memory (label k stands for x_{k+1}).
struct SymbolicReward {
    std::size_t labels = 0;
    std::vector<std::vector<std::size_t>> values; ///< values[s][a] in [0, labels)
    bool operator==(const SymbolicReward&) const = default;
};

using RewardSpec = std::variant<ScalarReward, VectorReward, SymbolicReward>;

std::string reward_kind_name(const RewardSpec& reward);

/**
 * Immutable finite MDP instance.
 *
 * The constructor validates every structural invariant: transition rows are
 * distributions (within kProbabilityTolerance), 0 <= discount < 1, the
 * initial distribution is strictly positive and sums to one, and the reward
 * specification covers every (state, action) pair. Violations throw
 * ValidationError naming the offending entry.
 */
class MdpInstance {
public:
    MdpInstance(std::size_t states, std::size_t actions,
                std::vector<std::vector<Vector>> transitions, double discount,
                RewardSpec reward, Vector initial_distribution);

    std::size_t state_count() const { return states_; }
    std::size_t action_count() const { return actions_; }
    double discount() const { return discount_; }

    /// Distribution over next states for (s, a).
    const Vector& transition(std::size_t s, std::size_t a) const { return transitions_[s][a]; }
    double transition(std::size_t s, std::size_t a, std::size_t next) const {
        return transitions_[s][a][next];
    }
    const std::vector<std::vector<Vector>>& transitions() const { return transitions_; }

    const RewardSpec& reward() const { return reward_; }
    const Vector& initial_distribution() const { return initial_; }

    /// Accessors that throw ValidationError when the reward has another kind.
    const ScalarReward& scalar_reward() const;
    const VectorReward& vector_reward() const;
    const SymbolicReward& symbolic_reward() const;

    /// Same dynamics, different reward.
    MdpInstance with_reward(RewardSpec reward) const;

    bool operator==(const MdpInstance&) const = default;

private:
    std::size_t states_;
    std::size_t actions_;
    std::vector<std::vector<Vector>> transitions_;
    double discount_;
    RewardSpec reward_;
    Vector initial_;
};

// ---------------------------------------------------------------------------
// Policies

struct DeterministicPolicy {
    std::vector<std::size_t> actions; ///< action per state
    auto operator<=>(const DeterministicPolicy&) const = default;
};

struct RandomizedPolicy {
    std::vector<Vector> probabilities; ///< probabilities[s][a]
    bool operator==(const RandomizedPolicy&) const = default;
};

/// Randomization over whole deterministic policies rather than actions.
struct MixedPolicy {
    std::vector<DeterministicPolicy> components;
    Vector weights;
    bool operator==(const MixedPolicy&) const = default;
};

using Policy = std::variant<DeterministicPolicy, RandomizedPolicy, MixedPolicy>;

/// Throws ValidationError if the policy does not fit the instance.
void validate_policy(const MdpInstance& mdp, const Policy& policy);

/// Per-state action distribution of a stationary policy. Rejects mixed policies.
std::vector<Vector> action_probabilities(const MdpInstance& mdp, const Policy& policy);

RandomizedPolicy to_randomized(const MdpInstance& mdp, const DeterministicPolicy& policy);

// ---------------------------------------------------------------------------
// Histories

/// (s_0, a_1, s_1, ..., a_t, s_t): states.size() == actions.size() + 1.
struct History {
    std::vector<std::size_t> states;
    std::vector<std::size_t> actions;

    std::size_t length() const { return actions.size(); }
    std::size_t last_state() const { return states.back(); }

    auto operator<=>(const History&) const = default;
};

/// Throws ValidationError if an index is out of range or a step has zero
/// transition probability.
void validate_history(const MdpInstance& mdp, const History& h);

/// Concatenate h1 with h2, where h2 starts at h1's final state.
History concatenate(const History& h1, const History& h2);

std::string to_string(const History& h);

} // namespace pbmo
