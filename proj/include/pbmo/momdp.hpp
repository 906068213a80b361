#pragma once

// Vector-reward evaluation, dominance relations, Pareto frontiers,
// epsilon-covers and scalarizing functions.

#include "pbmo/evaluation.hpp"

#include <functional>
#include <memory>
#include <string>
#include <variant>

namespace pbmo {

struct VectorValueFunction {
    std::size_t dimension = 0;
    std::vector<Vector> values; ///< one d-vector per state
};

VectorValueFunction vector_evaluate(const MdpInstance& mdp, const Policy& policy,
                                    double tol = kDefaultTolerance);

/// u >= v componentwise with u != v.
bool pareto_dominates(std::span<const double> u, std::span<const double> v);

/// No smaller anywhere (any state, any objective) and greater somewhere.
bool pareto_dominates(const VectorValueFunction& u, const VectorValueFunction& v);

/// Prefix sums of the components sorted in non-decreasing order.
Vector lorenz_vector(std::span<const double> v);

bool lorenz_dominates(std::span<const double> u, std::span<const double> v);

struct ParetoMember {
    DeterministicPolicy policy;
    std::size_t policy_index = 0; ///< position in enumerate_deterministic_policies
    Vector value;                 ///< mu-aggregated value vector
};

/// Mutually non-dominated members sorted lexicographically by value.
struct ParetoSet {
    std::vector<ParetoMember> members;
};

/// Indices of the non-dominated points. Equal points are all kept.
std::vector<std::size_t> pareto_filter(const std::vector<Vector>& points);

/// Exact Pareto frontier over deterministic stationary policies.
ParetoSet pareto_frontier(const MdpInstance& mdp, std::size_t cap = kDefaultPolicyCap,
                          double tol = kDefaultTolerance);

/// mu-aggregated value vector of every deterministic policy, in enumeration order.
std::vector<Vector> enumerate_policy_values(const MdpInstance& mdp,
                                            const std::vector<DeterministicPolicy>& policies,
                                            double tol = kDefaultTolerance);

/**
 * Greedy epsilon-cover.
 *
 * Points must be nonnegative. Only Pareto-optimal points are candidates (a
 * dominating nonnegative point covers what it dominates at any epsilon);
 * they are scanned in non-increasing lexicographic order and kept when no
 * kept point v' satisfies (1 + eps) v' >= v. Returns indices into `points`.
 */
std::vector<std::size_t> epsilon_cover(const std::vector<Vector>& points, double epsilon);

/// True iff every point of `points` is (1 + eps)-covered by some member of `cover`.
bool verify_cover(const std::vector<Vector>& cover, const std::vector<Vector>& points, double epsilon);

// ---------------------------------------------------------------------------
// Scalarizing functions

class ScalarizingFunction {
public:
    struct Linear {
        Vector weights;
    };
    /// -max_i (reference_i - v_i): higher is closer to the reference point.
    struct ChebyshevToIdeal {
        Vector reference;
    };
    struct UserMonotone {
        std::string name;
        std::function<double(std::span<const double>)> evaluate;
    };

    static ScalarizingFunction linear(Vector weights);
    static ScalarizingFunction chebyshev(Vector reference);

    /// Wraps a user evaluator after a sampled monotonicity check over
    /// `samples` random pairs u >= v; throws ValidationError if it fails.
    static ScalarizingFunction user(std::string name, std::size_t dimension,
                                    std::function<double(std::span<const double>)> evaluate,
                                    std::uint64_t seed = 1, std::size_t samples = 1000);

    double operator()(std::span<const double> v) const;

    bool is_linear() const { return std::holds_alternative<Linear>(kind_); }
    const Linear* as_linear() const { return std::get_if<Linear>(&kind_); }

private:
    explicit ScalarizingFunction(std::variant<Linear, ChebyshevToIdeal, UserMonotone> kind)
        : kind_(std::move(kind)) {}

    std::variant<Linear, ChebyshevToIdeal, UserMonotone> kind_;
};

/// Returns the first violating pair description, or nullopt if the sampled
/// pairs all satisfy u >= v => f(u) >= f(v).
std::optional<std::string> find_monotonicity_violation(
    const std::function<double(std::span<const double>)>& f, std::size_t dimension,
    std::uint64_t seed, std::size_t samples = 1000);

enum class ScalarizationLevel { Reward, History, Value };

struct ScalarizeOptions {
    ScalarizationLevel level = ScalarizationLevel::Value;
    std::size_t horizon = 0; ///< history level only; 0 picks the truncation horizon
    double truncation = 1e-6;
    std::size_t history_cap = kDefaultHistoryCap;
    double tol = kDefaultTolerance;
};

/**
 * Scalar valuation of a policy, mu-aggregated, at one of three levels:
 * reward (solve the MDP with reward f(R(s,a))), history (expected f of the
 * discounted vector value of histories), or value (f of the expected value
 * vector).
 */
double scalarize(const MdpInstance& mdp, const ScalarizingFunction& f, const Policy& policy,
                 const ScalarizeOptions& options = {});

/// The scalar-reward instance with reward f(R(s,a)).
MdpInstance scalarized_reward_instance(const MdpInstance& mdp, const ScalarizingFunction& f);

} // namespace pbmo
