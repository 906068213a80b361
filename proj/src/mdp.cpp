#include "pbmo/mdp.hpp"

#include "pbmo/error.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace pbmo {

namespace {

std::string pair_name(std::size_t s, std::size_t a) {
    return "(s=" + std::to_string(s) + ", a=" + std::to_string(a) + ")";
}

void require(bool condition, const std::string& message) {
    if (!condition) throw ValidationError(message);
}

void check_distribution(const Vector& p, const std::string& what) {
    double sum = 0.0;
    for (double x : p) {
        require(std::isfinite(x) && x >= 0.0, what + ": probabilities must be finite and nonnegative");
        sum += x;
    }
    if (std::abs(sum - 1.0) > kProbabilityTolerance) {
        std::ostringstream os;
        os.precision(17);
        os << what << ": probabilities sum to " << sum << ", expected 1";
        throw ValidationError(os.str());
    }
}

void validate_reward(const RewardSpec& reward, std::size_t states, std::size_t actions) {
    auto check_shape = [&](std::size_t rows, auto row_size) {
        require(rows == states, "reward: expected one row per state");
        for (std::size_t s = 0; s < states; ++s)
            require(row_size(s) == actions,
                    "reward: state " + std::to_string(s) + " needs one entry per action");
    };
    if (auto* r = std::get_if<ScalarReward>(&reward)) {
        check_shape(r->values.size(), [&](std::size_t s) { return r->values[s].size(); });
        for (std::size_t s = 0; s < states; ++s)
            for (std::size_t a = 0; a < actions; ++a)
                require(std::isfinite(r->values[s][a]), "reward " + pair_name(s, a) + " is not finite");
    } else if (auto* r = std::get_if<VectorReward>(&reward)) {
        require(r->dimension >= 1, "reward: vector dimension must be at least 1");
        check_shape(r->values.size(), [&](std::size_t s) { return r->values[s].size(); });
        for (std::size_t s = 0; s < states; ++s)
            for (std::size_t a = 0; a < actions; ++a) {
                require(r->values[s][a].size() == r->dimension,
                        "reward " + pair_name(s, a) + ": dimension mismatch");
                for (double x : r->values[s][a])
                    require(std::isfinite(x), "reward " + pair_name(s, a) + " is not finite");
            }
    } else {
        const auto& sym = std::get<SymbolicReward>(reward);
        require(sym.labels >= 1, "reward: symbolic reward needs at least one label");
        check_shape(sym.values.size(), [&](std::size_t s) { return sym.values[s].size(); });
        std::vector<bool> used(sym.labels, false);
        for (std::size_t s = 0; s < states; ++s)
            for (std::size_t a = 0; a < actions; ++a) {
                const std::size_t label = sym.values[s][a];
                require(label < sym.labels, "reward " + pair_name(s, a) + ": label out of range");
                used[label] = true;
            }
        for (std::size_t k = 0; k < sym.labels; ++k)
            require(used[k], "reward: label " + std::to_string(k + 1) + " is never used");
    }
}

} // namespace

std::string reward_kind_name(const RewardSpec& reward) {
    switch (reward.index()) {
    case 0: return "scalar";
    case 1: return "vector";
    default: return "symbolic";
    }
}

MdpInstance::MdpInstance(std::size_t states, std::size_t actions,
                         std::vector<std::vector<Vector>> transitions, double discount,
                         RewardSpec reward, Vector initial_distribution)
    : states_(states), actions_(actions), transitions_(std::move(transitions)),
      discount_(discount), reward_(std::move(reward)), initial_(std::move(initial_distribution)) {
    require(states_ >= 1, "instance needs at least one state");
    require(actions_ >= 1, "instance needs at least one action");
    require(std::isfinite(discount_) && discount_ >= 0.0 && discount_ < 1.0,
            "discount must lie in [0, 1)");
    require(transitions_.size() == states_, "transition: expected one block per state");
    for (std::size_t s = 0; s < states_; ++s) {
        require(transitions_[s].size() == actions_,
                "transition: state " + std::to_string(s) + " needs one row per action");
        for (std::size_t a = 0; a < actions_; ++a) {
            require(transitions_[s][a].size() == states_,
                    "transition " + pair_name(s, a) + ": row must have one entry per state");
            check_distribution(transitions_[s][a], "transition " + pair_name(s, a));
        }
    }
    require(initial_.size() == states_, "initial distribution: one entry per state required");
    check_distribution(initial_, "initial distribution");
    for (std::size_t s = 0; s < states_; ++s)
        require(initial_[s] > 0.0,
                "initial distribution: state " + std::to_string(s) + " must have positive probability");
    validate_reward(reward_, states_, actions_);
}

const ScalarReward& MdpInstance::scalar_reward() const {
    if (auto* r = std::get_if<ScalarReward>(&reward_)) return *r;
    throw ValidationError("operation requires a scalar reward, instance has a " +
                          reward_kind_name(reward_) + " reward");
}

const VectorReward& MdpInstance::vector_reward() const {
    if (auto* r = std::get_if<VectorReward>(&reward_)) return *r;
    throw ValidationError("operation requires a vector reward, instance has a " +
                          reward_kind_name(reward_) + " reward");
}

const SymbolicReward& MdpInstance::symbolic_reward() const {
    if (auto* r = std::get_if<SymbolicReward>(&reward_)) return *r;
    throw ValidationError("operation requires a symbolic reward, instance has a " +
                          reward_kind_name(reward_) + " reward");
}

MdpInstance MdpInstance::with_reward(RewardSpec reward) const {
    return MdpInstance(states_, actions_, transitions_, discount_, std::move(reward), initial_);
}

void validate_policy(const MdpInstance& mdp, const Policy& policy) {
    const std::size_t S = mdp.state_count();
    const std::size_t A = mdp.action_count();
    auto check_det = [&](const DeterministicPolicy& p) {
        require(p.actions.size() == S, "policy: expected one action per state");
        for (std::size_t s = 0; s < S; ++s)
            require(p.actions[s] < A, "policy: action out of range at state " + std::to_string(s));
    };
    if (auto* p = std::get_if<DeterministicPolicy>(&policy)) {
        check_det(*p);
    } else if (auto* p = std::get_if<RandomizedPolicy>(&policy)) {
        require(p->probabilities.size() == S, "policy: expected one row per state");
        for (std::size_t s = 0; s < S; ++s) {
            require(p->probabilities[s].size() == A,
                    "policy: state " + std::to_string(s) + " needs one probability per action");
            check_distribution(p->probabilities[s], "policy at state " + std::to_string(s));
        }
    } else {
        const auto& m = std::get<MixedPolicy>(policy);
        require(!m.components.empty(), "mixed policy: no components");
        require(m.components.size() == m.weights.size(), "mixed policy: one weight per component");
        for (const auto& c : m.components) check_det(c);
        check_distribution(m.weights, "mixed policy weights");
    }
}

std::vector<Vector> action_probabilities(const MdpInstance& mdp, const Policy& policy) {
    validate_policy(mdp, policy);
    if (auto* p = std::get_if<DeterministicPolicy>(&policy))
        return to_randomized(mdp, *p).probabilities;
    if (auto* p = std::get_if<RandomizedPolicy>(&policy)) return p->probabilities;
    throw ValidationError("mixed policies are not stationary; evaluate each component instead");
}

RandomizedPolicy to_randomized(const MdpInstance& mdp, const DeterministicPolicy& policy) {
    RandomizedPolicy out;
    out.probabilities.assign(mdp.state_count(), Vector(mdp.action_count(), 0.0));
    for (std::size_t s = 0; s < mdp.state_count(); ++s) out.probabilities[s][policy.actions[s]] = 1.0;
    return out;
}

void validate_history(const MdpInstance& mdp, const History& h) {
    require(h.states.size() == h.actions.size() + 1,
            "history: expected one more state than actions");
    for (std::size_t s : h.states) require(s < mdp.state_count(), "history: state index out of range");
    for (std::size_t a : h.actions) require(a < mdp.action_count(), "history: action index out of range");
    for (std::size_t i = 0; i < h.actions.size(); ++i)
        require(mdp.transition(h.states[i], h.actions[i], h.states[i + 1]) > 0.0,
                "history: step " + std::to_string(i + 1) + " from " +
                    pair_name(h.states[i], h.actions[i]) + " to state " +
                    std::to_string(h.states[i + 1]) + " has zero probability");
}

History concatenate(const History& h1, const History& h2) {
    if (h1.last_state() != h2.states.front())
        throw ValidationError("history concatenation: second history must start where the first ends");
    History out = h1;
    out.actions.insert(out.actions.end(), h2.actions.begin(), h2.actions.end());
    out.states.insert(out.states.end(), h2.states.begin() + 1, h2.states.end());
    return out;
}

std::string to_string(const History& h) {
    std::ostringstream os;
    os << "(" << h.states[0];
    for (std::size_t i = 0; i < h.actions.size(); ++i) os << ", a" << h.actions[i] << ", " << h.states[i + 1];
    os << ")";
    return os.str();
}

} // namespace pbmo
