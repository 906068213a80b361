#pragma once

// Narrowing the admissible weights by asking a simulated expert to compare
// elements of an epsilon-cover of the Pareto frontier.
//
// Weights live in the difference representation: for an ordered-reward
// instance with values x_1 < ... < x_d the scalar value is w . v_vec with
// w = (x_1, x_2 - x_1, ...). Only the direction of w matters, so the
// admissible set is kept on the simplex {w >= 0, sum w = 1} and every answer
// adds a half-space through the origin.

#include "pbmo/momdp.hpp"

#include <optional>
#include <string>

namespace pbmo {

class WeightPolytope {
public:
    explicit WeightPolytope(std::size_t dimension);

    std::size_t dimension() const { return dimension_; }
    /// Every cut c means w . c >= 0.
    const std::vector<Vector>& cuts() const { return cuts_; }
    void add_cut(Vector c);

    bool contains(std::span<const double> w, double tol = 1e-9) const;
    bool feasible() const;

    /// max w . direction over the polytope; nullopt when empty.
    std::optional<double> maximize(std::span<const double> direction) const;

    /// Point of the polytope farthest from its facets, measured inside the
    /// hyperplane sum w = 1.
    Vector center() const;

private:
    std::size_t dimension_;
    std::vector<Vector> cuts_;
};

struct Query {
    std::size_t first = 0;  ///< candidate index of u
    std::size_t second = 0; ///< candidate index of v
    Vector u;
    Vector v;
};

enum class Answer { First, Second };

/// Adds w . (u - v) >= 0 when the first element is preferred, the reverse
/// otherwise. Throws InconsistencyError when the region becomes empty.
WeightPolytope update_polytope(WeightPolytope polytope, const Query& query, Answer answer);

class SimulatedOracle {
public:
    /// Hidden values x*, strictly increasing with x*_1 >= 0.
    static SimulatedOracle from_reward_values(std::span<const double> values);
    /// Hidden weights, nonnegative and not all zero.
    static SimulatedOracle from_weights(std::span<const double> weights);

    /// Prefers u iff w* . u >= w* . v.
    Answer answer(const Query& q) const;
    const Vector& weights() const { return weights_; }

private:
    explicit SimulatedOracle(Vector weights) : weights_(std::move(weights)) {}
    Vector weights_; ///< normalized to sum 1
};

/// Candidates for which some feasible weight makes them at least as good as
/// every other candidate.
std::vector<std::size_t> feasibly_best(const WeightPolytope& polytope, const std::vector<Vector>& candidates,
                                       double tol = 1e-9);

struct ElicitationRound {
    Query query;
    Answer answer = Answer::First;
    double disagreement = 0.0; ///< min of the two one-sided advantages
    std::vector<std::size_t> remaining;
    std::vector<std::size_t> feasibly_best;
};

struct ElicitationResult {
    std::vector<ParetoMember> candidates; ///< the epsilon-cover of the frontier
    std::vector<ElicitationRound> rounds;
    std::size_t recommended = 0;          ///< index into candidates
    Vector center;                        ///< weights used for the recommendation
    WeightPolytope polytope{1};
    bool converged = false;               ///< false when max_queries stopped the loop
};

struct ElicitationOptions {
    double epsilon = 0.1;
    std::size_t max_queries = 1000;
    std::size_t cap = kDefaultPolicyCap;
    double tol = 1e-9;
    /// Called after every update so tests can check invariants each round.
    std::function<void(const WeightPolytope&, const ElicitationRound&)> observer;
};

/**
 * Queries the pair of remaining candidates with the largest disagreement,
 * drops the loser, and repeats until no pair disagrees. The recommendation is
 * the remaining candidate with the best value under the polytope's center.
 */
ElicitationResult elicit_loop(const MdpInstance& momdp, const SimulatedOracle& oracle,
                              const ElicitationOptions& options = {});

/// Same loop over given value vectors instead of an instance's frontier.
ElicitationResult elicit_over(std::vector<ParetoMember> candidates, const SimulatedOracle& oracle,
                              const ElicitationOptions& options = {});

} // namespace pbmo
