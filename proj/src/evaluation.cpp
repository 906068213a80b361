#include "pbmo/evaluation.hpp"

#include "pbmo/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace pbmo {

namespace {

constexpr std::size_t kMaxSweeps = 10'000'000;

/// Increment below which successive iterates guarantee distance `tol` to the
/// fixed point: ||v_{k+1} - v*|| <= gamma / (1 - gamma) ||v_{k+1} - v_k||.
double stopping_increment(double discount, double tol) {
    if (discount == 0.0) return std::numeric_limits<double>::infinity();
    return tol * (1.0 - discount) / discount;
}

/// Increments cannot shrink below the rounding noise of the iterate itself.
double rounding_floor(double scale) {
    return 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, scale);
}

void check_tolerance(double tol) {
    if (!(tol > 0.0) || !std::isfinite(tol)) throw ValidationError("tolerance must be positive");
}

} // namespace

std::vector<Vector> evaluate_components(const MdpInstance& mdp,
                                        const std::vector<Vector>& action_probs,
                                        const std::vector<std::vector<Vector>>& rewards,
                                        double tol) {
    check_tolerance(tol);
    const std::size_t S = mdp.state_count();
    const std::size_t A = mdp.action_count();
    const std::size_t D = rewards.at(0).at(0).size();
    const double gamma = mdp.discount();

    // P_pi and r_pi
    Matrix P(S, S);
    std::vector<Vector> r(S, Vector(D, 0.0));
    for (std::size_t s = 0; s < S; ++s)
        for (std::size_t a = 0; a < A; ++a) {
            const double pa = action_probs[s][a];
            if (pa == 0.0) continue;
            for (std::size_t k = 0; k < D; ++k) r[s][k] += pa * rewards[s][a][k];
            const Vector& row = mdp.transition(s, a);
            for (std::size_t t = 0; t < S; ++t) P(s, t) += pa * row[t];
        }

    const double target = stopping_increment(gamma, tol);
    std::vector<Vector> v(S, Vector(D, 0.0));
    std::vector<Vector> next(S, Vector(D, 0.0));
    for (std::size_t sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double delta = 0.0;
        double scale = 0.0;
        for (std::size_t s = 0; s < S; ++s) {
            for (std::size_t k = 0; k < D; ++k) {
                double acc = 0.0;
                for (std::size_t t = 0; t < S; ++t) acc += P(s, t) * v[t][k];
                next[s][k] = r[s][k] + gamma * acc;
                delta = std::max(delta, std::abs(next[s][k] - v[s][k]));
                scale = std::max(scale, std::abs(next[s][k]));
            }
        }
        std::swap(v, next);
        if (delta <= target || delta <= rounding_floor(scale)) return v;
    }
    throw NumericalError("policy evaluation did not converge");
}

Vector evaluate_policy(const MdpInstance& mdp, const Policy& policy, double tol) {
    const auto& reward = mdp.scalar_reward();
    const auto probs = action_probabilities(mdp, policy);
    std::vector<std::vector<Vector>> rewards(mdp.state_count());
    for (std::size_t s = 0; s < mdp.state_count(); ++s)
        for (std::size_t a = 0; a < mdp.action_count(); ++a)
            rewards[s].push_back({reward.values[s][a]});
    const auto v = evaluate_components(mdp, probs, rewards, tol);
    Vector out(v.size());
    for (std::size_t s = 0; s < v.size(); ++s) out[s] = v[s][0];
    return out;
}

DeterministicPolicy greedy_policy(const MdpInstance& mdp, const Vector& values) {
    const auto& reward = mdp.scalar_reward();
    DeterministicPolicy policy;
    policy.actions.resize(mdp.state_count());
    for (std::size_t s = 0; s < mdp.state_count(); ++s) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < mdp.action_count(); ++a) {
            const double q = reward.values[s][a] + mdp.discount() * dot(mdp.transition(s, a), values);
            if (q > best) {
                best = q;
                policy.actions[s] = a;
            }
        }
    }
    return policy;
}

ValueIterationResult value_iteration(const MdpInstance& mdp, double tol) {
    check_tolerance(tol);
    const auto& reward = mdp.scalar_reward();
    const std::size_t S = mdp.state_count();
    const double gamma = mdp.discount();
    const double target = stopping_increment(gamma, tol);

    ValueIterationResult result;
    Vector v(S, 0.0), next(S, 0.0);
    for (std::size_t sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double delta = 0.0;
        double scale = 0.0;
        for (std::size_t s = 0; s < S; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t a = 0; a < mdp.action_count(); ++a)
                best = std::max(best, reward.values[s][a] + gamma * dot(mdp.transition(s, a), v));
            next[s] = best;
            delta = std::max(delta, std::abs(next[s] - v[s]));
            scale = std::max(scale, std::abs(next[s]));
        }
        std::swap(v, next);
        result.increments.push_back(delta);
        if (delta <= target || delta <= rounding_floor(scale)) {
            result.iterations = sweep + 1;
            result.values = v;
            result.policy = greedy_policy(mdp, v);
            return result;
        }
    }
    throw NumericalError("value iteration did not converge");
}

double history_value(const MdpInstance& mdp, const History& h) {
    const auto& reward = mdp.scalar_reward();
    validate_history(mdp, h);
    double total = 0.0;
    double weight = 1.0;
    for (std::size_t i = 0; i < h.length(); ++i) {
        total += weight * reward.values[h.states[i]][h.actions[i]];
        weight *= mdp.discount();
    }
    return total;
}

Vector history_vector_value(const MdpInstance& mdp, const History& h) {
    const auto& reward = mdp.vector_reward();
    validate_history(mdp, h);
    Vector total(reward.dimension, 0.0);
    double weight = 1.0;
    for (std::size_t i = 0; i < h.length(); ++i) {
        const Vector& r = reward.values[h.states[i]][h.actions[i]];
        for (std::size_t k = 0; k < total.size(); ++k) total[k] += weight * r[k];
        weight *= mdp.discount();
    }
    return total;
}

History sample_history(const MdpInstance& mdp, const Policy& policy, std::size_t horizon,
                       std::uint64_t seed, std::optional<std::size_t> start) {
    Rng rng(seed);
    return sample_history(mdp, policy, horizon, rng, start);
}

History sample_history(const MdpInstance& mdp, const Policy& policy, std::size_t horizon,
                       Rng& rng, std::optional<std::size_t> start) {
    validate_policy(mdp, policy);
    if (start && *start >= mdp.state_count()) throw ValidationError("start state out of range");

    // a mixed policy commits to one deterministic component for the whole run
    std::vector<Vector> probs;
    if (auto* m = std::get_if<MixedPolicy>(&policy)) {
        const std::size_t c = rng.categorical(m->weights);
        probs = to_randomized(mdp, m->components[c]).probabilities;
    } else {
        probs = action_probabilities(mdp, policy);
    }

    History h;
    h.states.push_back(start ? *start : rng.categorical(mdp.initial_distribution()));
    for (std::size_t t = 0; t < horizon; ++t) {
        const std::size_t s = h.states.back();
        const std::size_t a = rng.categorical(probs[s]);
        h.actions.push_back(a);
        h.states.push_back(rng.categorical(mdp.transition(s, a)));
    }
    return h;
}

namespace {

class HistoryEnumerator {
public:
    HistoryEnumerator(const MdpInstance& mdp, const std::vector<Vector>& probs, std::size_t horizon,
                      std::size_t cap, double weight, std::vector<WeightedHistory>& out)
        : mdp_(mdp), probs_(probs), horizon_(horizon), cap_(cap), weight_(weight), out_(out) {}

    void run(std::size_t start, double p0) {
        History h;
        h.states.push_back(start);
        expand(h, weight_ * p0);
    }

private:
    void expand(History& h, double p) {
        if (++expanded_ > cap_)
            throw CapExceededError("history enumeration exceeds cap of " + std::to_string(cap_) +
                                   " paths; lower the horizon or raise --cap");
        if (h.length() == horizon_) {
            out_.push_back({h, p});
            return;
        }
        const std::size_t s = h.last_state();
        for (std::size_t a = 0; a < mdp_.action_count(); ++a) {
            const double pa = probs_[s][a];
            if (pa <= 0.0) continue;
            const Vector& row = mdp_.transition(s, a);
            for (std::size_t t = 0; t < mdp_.state_count(); ++t) {
                if (row[t] <= 0.0) continue;
                h.actions.push_back(a);
                h.states.push_back(t);
                expand(h, p * pa * row[t]);
                h.actions.pop_back();
                h.states.pop_back();
            }
        }
    }

    const MdpInstance& mdp_;
    const std::vector<Vector>& probs_;
    std::size_t horizon_;
    std::size_t cap_;
    double weight_;
    std::vector<WeightedHistory>& out_;
    std::size_t expanded_ = 0;
};

} // namespace

std::vector<WeightedHistory> enumerate_histories(const MdpInstance& mdp, const Policy& policy,
                                                 std::size_t horizon,
                                                 const EnumerationOptions& options) {
    validate_policy(mdp, policy);
    if (options.start && *options.start >= mdp.state_count())
        throw ValidationError("start state out of range");

    std::vector<std::pair<std::vector<Vector>, double>> parts;
    if (auto* m = std::get_if<MixedPolicy>(&policy)) {
        for (std::size_t c = 0; c < m->components.size(); ++c)
            if (m->weights[c] > 0.0)
                parts.emplace_back(to_randomized(mdp, m->components[c]).probabilities, m->weights[c]);
    } else {
        parts.emplace_back(action_probabilities(mdp, policy), 1.0);
    }

    std::vector<WeightedHistory> raw;
    for (const auto& [probs, w] : parts) {
        HistoryEnumerator e(mdp, probs, horizon, options.cap, w, raw);
        if (options.start) {
            e.run(*options.start, 1.0);
        } else {
            for (std::size_t s = 0; s < mdp.state_count(); ++s) e.run(s, mdp.initial_distribution()[s]);
        }
    }

    std::sort(raw.begin(), raw.end(),
              [](const WeightedHistory& x, const WeightedHistory& y) { return x.history < y.history; });
    // merge identical paths produced by different mixture components
    std::vector<WeightedHistory> out;
    for (auto& wh : raw) {
        if (!out.empty() && out.back().history == wh.history)
            out.back().probability += wh.probability;
        else
            out.push_back(std::move(wh));
    }
    return out;
}

std::optional<std::size_t> deterministic_policy_count(const MdpInstance& mdp) {
    std::size_t count = 1;
    for (std::size_t s = 0; s < mdp.state_count(); ++s) {
        if (count > std::numeric_limits<std::size_t>::max() / mdp.action_count()) return std::nullopt;
        count *= mdp.action_count();
    }
    return count;
}

std::vector<DeterministicPolicy> enumerate_deterministic_policies(const MdpInstance& mdp,
                                                                  std::size_t cap) {
    const auto count = deterministic_policy_count(mdp);
    if (!count || *count > cap)
        throw CapExceededError("deterministic policy enumeration exceeds cap of " + std::to_string(cap));
    std::vector<DeterministicPolicy> out;
    out.reserve(*count);
    DeterministicPolicy current{std::vector<std::size_t>(mdp.state_count(), 0)};
    for (std::size_t i = 0; i < *count; ++i) {
        out.push_back(current);
        // odometer increment with the last state varying fastest
        for (std::size_t s = mdp.state_count(); s-- > 0;) {
            if (++current.actions[s] < mdp.action_count()) break;
            current.actions[s] = 0;
        }
    }
    return out;
}

std::size_t truncation_horizon(double discount, double relative_bound) {
    if (!(relative_bound > 0.0 && relative_bound < 1.0))
        throw ValidationError("truncation bound must lie in (0, 1)");
    if (discount == 0.0) return 1;
    std::size_t h = 1;
    double tail = discount;
    while (tail >= relative_bound) {
        tail *= discount;
        ++h;
    }
    return h;
}

double aggregate(const MdpInstance& mdp, const Vector& values) {
    return dot(mdp.initial_distribution(), values);
}

Vector aggregate(const MdpInstance& mdp, const std::vector<Vector>& values) {
    Vector out(values.at(0).size(), 0.0);
    for (std::size_t s = 0; s < values.size(); ++s)
        for (std::size_t k = 0; k < out.size(); ++k) out[k] += mdp.initial_distribution()[s] * values[s][k];
    return out;
}

} // namespace pbmo
