#pragma once

#include "pbmo/mdp.hpp"
#include "pbmo/rng.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace pbmo {

inline constexpr double kDefaultTolerance = 1e-9;
inline constexpr std::size_t kDefaultHistoryCap = 1'000'000;
inline constexpr std::size_t kDefaultPolicyCap = 100'000;

/**
 * Value of a stationary policy under a scalar reward.
 *
 * Iterates v_{k+1} = r_pi + gamma P_pi v_k from v_0 = 0 and stops once the
 * sup-norm increment certifies that the returned vector is within `tol` of
 * the fixed point (which bounds the Bellman residual by `tol` as well).
 */
Vector evaluate_policy(const MdpInstance& mdp, const Policy& policy, double tol = kDefaultTolerance);

/**
 * Evaluate a stationary policy for several reward signals at once.
 *
 * rewards[s][a] holds one value per signal; the result holds one vector per
 * state with the same number of entries. Stopping uses the largest increment
 * over all signals, so every component is at least as converged as its
 * stand-alone scalar evaluation.
 */
std::vector<Vector> evaluate_components(const MdpInstance& mdp,
                                        const std::vector<Vector>& action_probs,
                                        const std::vector<std::vector<Vector>>& rewards,
                                        double tol = kDefaultTolerance);

struct ValueIterationResult {
    Vector values;
    DeterministicPolicy policy; ///< greedy for `values`, ties to the lowest action
    std::size_t iterations = 0;
    Vector increments; ///< ||v_{k+1} - v_k||_inf for every sweep
};

ValueIterationResult value_iteration(const MdpInstance& mdp, double tol = kDefaultTolerance);

/// Greedy action for each state with respect to `values` (lowest index on ties).
DeterministicPolicy greedy_policy(const MdpInstance& mdp, const Vector& values);

/// sum_{i=1}^t gamma^{i-1} R(s_{i-1}, a_i). Requires a scalar reward.
double history_value(const MdpInstance& mdp, const History& h);

/// Discounted vector reward along h. Requires a vector reward.
Vector history_vector_value(const MdpInstance& mdp, const History& h);

/// Draws a history of length `horizon`. The first state comes from the
/// initial distribution unless `start` is given.
History sample_history(const MdpInstance& mdp, const Policy& policy, std::size_t horizon,
                       std::uint64_t seed, std::optional<std::size_t> start = std::nullopt);

/// Same as above but continues an existing generator.
History sample_history(const MdpInstance& mdp, const Policy& policy, std::size_t horizon,
                       Rng& rng, std::optional<std::size_t> start = std::nullopt);

struct WeightedHistory {
    History history;
    double probability = 0.0;
};

struct EnumerationOptions {
    std::size_t cap = kDefaultHistoryCap; ///< maximum number of paths expanded
    std::optional<std::size_t> start;     ///< fixed initial state instead of mu
};

/// Every positive-probability history of exactly `horizon` steps, sorted.
std::vector<WeightedHistory> enumerate_histories(const MdpInstance& mdp, const Policy& policy,
                                                 std::size_t horizon,
                                                 const EnumerationOptions& options = {});

/// All |A|^|S| deterministic policies in lexicographic order of their action
/// tuples (state 0 most significant).
std::vector<DeterministicPolicy> enumerate_deterministic_policies(const MdpInstance& mdp,
                                                                  std::size_t cap = kDefaultPolicyCap);

/// Number of deterministic policies, or nullopt if it overflows size_t.
std::optional<std::size_t> deterministic_policy_count(const MdpInstance& mdp);

/// Smallest H >= 1 with gamma^H < relative_bound, i.e. the tail beyond H is
/// below relative_bound times the value scale R_max / (1 - gamma).
std::size_t truncation_horizon(double discount, double relative_bound = 1e-6);

/// sum_s mu(s) v(s)
double aggregate(const MdpInstance& mdp, const Vector& values);
Vector aggregate(const MdpInstance& mdp, const std::vector<Vector>& values);

} // namespace pbmo
