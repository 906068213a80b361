#include "pbmo/momdp.hpp"

#include "pbmo/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace pbmo {

namespace {

void require_same_dimension(std::size_t a, std::size_t b) {
    if (a != b)
        throw ValidationError("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

bool lexicographically_greater(const Vector& a, const Vector& b) {
    return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

} // namespace

VectorValueFunction vector_evaluate(const MdpInstance& mdp, const Policy& policy, double tol) {
    const auto& reward = mdp.vector_reward();
    const auto probs = action_probabilities(mdp, policy);
    return {reward.dimension, evaluate_components(mdp, probs, reward.values, tol)};
}

bool pareto_dominates(std::span<const double> u, std::span<const double> v) {
    require_same_dimension(u.size(), v.size());
    bool strict = false;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u[i] < v[i]) return false;
        if (u[i] > v[i]) strict = true;
    }
    return strict;
}

bool pareto_dominates(const VectorValueFunction& u, const VectorValueFunction& v) {
    require_same_dimension(u.dimension, v.dimension);
    require_same_dimension(u.values.size(), v.values.size());
    bool strict = false;
    for (std::size_t s = 0; s < u.values.size(); ++s)
        for (std::size_t i = 0; i < u.dimension; ++i) {
            if (u.values[s][i] < v.values[s][i]) return false;
            if (u.values[s][i] > v.values[s][i]) strict = true;
        }
    return strict;
}

Vector lorenz_vector(std::span<const double> v) {
    Vector sorted(v.begin(), v.end());
    std::sort(sorted.begin(), sorted.end());
    std::partial_sum(sorted.begin(), sorted.end(), sorted.begin());
    return sorted;
}

bool lorenz_dominates(std::span<const double> u, std::span<const double> v) {
    require_same_dimension(u.size(), v.size());
    return pareto_dominates(lorenz_vector(u), lorenz_vector(v));
}

std::vector<std::size_t> pareto_filter(const std::vector<Vector>& points) {
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    // A dominator is lexicographically greater, so a descending scan only
    // needs to test candidates against members already kept.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return lexicographically_greater(points[a], points[b]);
    });
    std::vector<std::size_t> kept;
    for (std::size_t idx : order) {
        bool dominated = false;
        for (std::size_t k : kept)
            if (pareto_dominates(points[k], points[idx])) {
                dominated = true;
                break;
            }
        if (!dominated) kept.push_back(idx);
    }
    return kept;
}

std::vector<Vector> enumerate_policy_values(const MdpInstance& mdp,
                                            const std::vector<DeterministicPolicy>& policies,
                                            double tol) {
    std::vector<Vector> values;
    values.reserve(policies.size());
    for (const auto& p : policies) values.push_back(aggregate(mdp, vector_evaluate(mdp, p, tol).values));
    return values;
}

ParetoSet pareto_frontier(const MdpInstance& mdp, std::size_t cap, double tol) {
    mdp.vector_reward();
    const auto policies = enumerate_deterministic_policies(mdp, cap);
    const auto values = enumerate_policy_values(mdp, policies, tol);
    auto kept = pareto_filter(values);
    std::sort(kept.begin(), kept.end(), [&](std::size_t a, std::size_t b) {
        if (values[a] != values[b]) return values[a] < values[b];
        return a < b;
    });
    ParetoSet set;
    for (std::size_t i : kept) set.members.push_back({policies[i], i, values[i]});
    return set;
}

std::vector<std::size_t> epsilon_cover(const std::vector<Vector>& points, double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ValidationError("epsilon must be positive");
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (i > 0) require_same_dimension(points[i].size(), points[0].size());
        for (double x : points[i])
            if (!(x >= 0.0) || !std::isfinite(x))
                throw ValidationError("epsilon cover needs finite nonnegative coordinates (point " +
                                      std::to_string(i) + ")");
    }
    auto candidates = pareto_filter(points); // already non-increasing lexicographic
    std::vector<std::size_t> cover;
    for (std::size_t idx : candidates) {
        const Vector& v = points[idx];
        const bool covered = std::any_of(cover.begin(), cover.end(), [&](std::size_t c) {
            for (std::size_t k = 0; k < v.size(); ++k)
                if ((1.0 + epsilon) * points[c][k] < v[k]) return false;
            return true;
        });
        if (!covered) cover.push_back(idx);
    }
    return cover;
}

bool verify_cover(const std::vector<Vector>& cover, const std::vector<Vector>& points, double epsilon) {
    for (const Vector& v : points) {
        bool covered = false;
        for (const Vector& c : cover) {
            if (c.size() != v.size()) continue;
            bool ok = true;
            for (std::size_t k = 0; k < v.size() && ok; ++k) ok = (1.0 + epsilon) * c[k] >= v[k];
            if (ok) {
                covered = true;
                break;
            }
        }
        if (!covered) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------

ScalarizingFunction ScalarizingFunction::linear(Vector weights) {
    for (double w : weights)
        if (!std::isfinite(w)) throw ValidationError("linear scalarization: weights must be finite");
    return ScalarizingFunction(Linear{std::move(weights)});
}

ScalarizingFunction ScalarizingFunction::chebyshev(Vector reference) {
    for (double r : reference)
        if (!std::isfinite(r)) throw ValidationError("Chebyshev scalarization: reference must be finite");
    return ScalarizingFunction(ChebyshevToIdeal{std::move(reference)});
}

ScalarizingFunction ScalarizingFunction::user(std::string name, std::size_t dimension,
                                              std::function<double(std::span<const double>)> evaluate,
                                              std::uint64_t seed, std::size_t samples) {
    if (auto violation = find_monotonicity_violation(evaluate, dimension, seed, samples))
        throw ValidationError("scalarizing function '" + name + "' is not monotone: " + *violation);
    return ScalarizingFunction(UserMonotone{std::move(name), std::move(evaluate)});
}

double ScalarizingFunction::operator()(std::span<const double> v) const {
    return std::visit(
        [&](const auto& k) -> double {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, Linear>) {
                require_same_dimension(k.weights.size(), v.size());
                return dot(k.weights, v);
            } else if constexpr (std::is_same_v<K, ChebyshevToIdeal>) {
                require_same_dimension(k.reference.size(), v.size());
                double worst = -std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < v.size(); ++i) worst = std::max(worst, k.reference[i] - v[i]);
                return -worst;
            } else {
                return k.evaluate(v);
            }
        },
        kind_);
}

std::optional<std::string> find_monotonicity_violation(
    const std::function<double(std::span<const double>)>& f, std::size_t dimension,
    std::uint64_t seed, std::size_t samples) {
    Rng rng(seed);
    Vector u(dimension), v(dimension);
    for (std::size_t n = 0; n < samples; ++n) {
        for (std::size_t k = 0; k < dimension; ++k) {
            v[k] = rng.uniform(-10.0, 10.0);
            // leave some coordinates tied so boundary behaviour is exercised
            u[k] = v[k] + (rng.uniform() < 0.3 ? 0.0 : rng.uniform(0.0, 5.0));
        }
        const double fu = f(u), fv = f(v);
        if (!(fu >= fv)) {
            std::ostringstream os;
            os.precision(17);
            os << "f(u) = " << fu << " < f(v) = " << fv << " for a pair with u >= v";
            return os.str();
        }
    }
    return std::nullopt;
}

MdpInstance scalarized_reward_instance(const MdpInstance& mdp, const ScalarizingFunction& f) {
    const auto& reward = mdp.vector_reward();
    ScalarReward scalar;
    scalar.values.assign(mdp.state_count(), Vector(mdp.action_count()));
    for (std::size_t s = 0; s < mdp.state_count(); ++s)
        for (std::size_t a = 0; a < mdp.action_count(); ++a) scalar.values[s][a] = f(reward.values[s][a]);
    return mdp.with_reward(std::move(scalar));
}

double scalarize(const MdpInstance& mdp, const ScalarizingFunction& f, const Policy& policy,
                 const ScalarizeOptions& options) {
    mdp.vector_reward();
    switch (options.level) {
    case ScalarizationLevel::Reward: {
        const auto scalar = scalarized_reward_instance(mdp, f);
        if (std::holds_alternative<MixedPolicy>(policy)) {
            const auto& m = std::get<MixedPolicy>(policy);
            double total = 0.0;
            for (std::size_t c = 0; c < m.components.size(); ++c)
                total += m.weights[c] * aggregate(scalar, evaluate_policy(scalar, m.components[c], options.tol));
            return total;
        }
        return aggregate(scalar, evaluate_policy(scalar, policy, options.tol));
    }
    case ScalarizationLevel::History: {
        const std::size_t horizon =
            options.horizon > 0 ? options.horizon : truncation_horizon(mdp.discount(), options.truncation);
        const auto histories = enumerate_histories(mdp, policy, horizon, {options.history_cap, std::nullopt});
        double total = 0.0;
        for (const auto& wh : histories) total += wh.probability * f(history_vector_value(mdp, wh.history));
        return total;
    }
    case ScalarizationLevel::Value: {
        if (std::holds_alternative<MixedPolicy>(policy)) {
            const auto& m = std::get<MixedPolicy>(policy);
            Vector mean(mdp.vector_reward().dimension, 0.0);
            for (std::size_t c = 0; c < m.components.size(); ++c) {
                const Vector v = aggregate(mdp, vector_evaluate(mdp, m.components[c], options.tol).values);
                for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += m.weights[c] * v[k];
            }
            return f(mean);
        }
        return f(aggregate(mdp, vector_evaluate(mdp, policy, options.tol).values));
    }
    }
    throw ValidationError("unknown scalarization level");
}

} // namespace pbmo
