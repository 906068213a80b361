#include "pbmo/random_instances.hpp"

#include "pbmo/error.hpp"

#include <algorithm>
#include <numeric>

namespace pbmo {

namespace {

Vector random_distribution(Rng& rng, std::size_t n, std::size_t support) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i + 1 < n; ++i) std::swap(idx[i], idx[i + rng.index(n - i)]);
    Vector p(n, 0.0);
    double total = 0.0;
    for (std::size_t k = 0; k < support; ++k) total += (p[idx[k]] = 0.05 + rng.uniform());
    for (double& x : p) x /= total;
    return p;
}

} // namespace

MdpInstance random_dynamics(Rng& rng, const InstanceShape& shape) {
    const std::size_t S = rng.between(shape.min_states, shape.max_states);
    const std::size_t A = rng.between(shape.min_actions, shape.max_actions);
    const double gamma = rng.uniform(shape.min_discount, shape.max_discount);
    std::vector<std::vector<Vector>> transitions(S, std::vector<Vector>(A));
    for (auto& row : transitions)
        for (auto& p : row) p = random_distribution(rng, S, rng.between(1, std::min(S, shape.max_successors)));
    Vector mu = random_distribution(rng, S, S);
    ScalarReward zero{std::vector<Vector>(S, Vector(A, 0.0))};
    return MdpInstance(S, A, std::move(transitions), gamma, std::move(zero), std::move(mu));
}

MdpInstance random_scalar_instance(Rng& rng, const InstanceShape& shape, double lo, double hi) {
    MdpInstance base = random_dynamics(rng, shape);
    ScalarReward r{std::vector<Vector>(base.state_count(), Vector(base.action_count()))};
    for (auto& row : r.values)
        for (double& x : row) x = rng.uniform(lo, hi);
    return base.with_reward(std::move(r));
}

MdpInstance random_vector_instance(Rng& rng, const InstanceShape& shape, std::size_t dimension, double lo,
                                   double hi) {
    MdpInstance base = random_dynamics(rng, shape);
    VectorReward r;
    r.dimension = dimension;
    r.values.assign(base.state_count(), std::vector<Vector>(base.action_count(), Vector(dimension)));
    for (auto& row : r.values)
        for (auto& v : row)
            for (double& x : v) x = rng.uniform(lo, hi);
    return base.with_reward(std::move(r));
}

MdpInstance random_symbolic_instance(Rng& rng, const InstanceShape& shape, std::size_t labels) {
    MdpInstance base = random_dynamics(rng, shape);
    const std::size_t pairs = base.state_count() * base.action_count();
    if (pairs < labels)
        throw ValidationError("cannot use " + std::to_string(labels) + " labels on " + std::to_string(pairs) +
                              " state-action pairs");
    // first `labels` shuffled pairs get one label each, the rest are random
    std::vector<std::size_t> slots(pairs);
    std::iota(slots.begin(), slots.end(), std::size_t{0});
    for (std::size_t i = 0; i + 1 < pairs; ++i) std::swap(slots[i], slots[i + rng.index(pairs - i)]);
    SymbolicReward r;
    r.labels = labels;
    r.values.assign(base.state_count(), std::vector<std::size_t>(base.action_count(), 0));
    for (std::size_t k = 0; k < pairs; ++k) {
        const std::size_t s = slots[k] / base.action_count();
        const std::size_t a = slots[k] % base.action_count();
        r.values[s][a] = k < labels ? k : rng.index(labels);
    }
    return base.with_reward(std::move(r));
}

DeterministicPolicy random_deterministic_policy(const MdpInstance& mdp, Rng& rng) {
    DeterministicPolicy p;
    for (std::size_t s = 0; s < mdp.state_count(); ++s) p.actions.push_back(rng.index(mdp.action_count()));
    return p;
}

RandomizedPolicy random_randomized_policy(const MdpInstance& mdp, Rng& rng) {
    RandomizedPolicy p;
    for (std::size_t s = 0; s < mdp.state_count(); ++s)
        p.probabilities.push_back(random_distribution(rng, mdp.action_count(), mdp.action_count()));
    return p;
}

RewardOrder random_order(std::size_t labels, Rng& rng) {
    RewardOrder order;
    order.ascending.resize(labels);
    std::iota(order.ascending.begin(), order.ascending.end(), std::size_t{0});
    for (std::size_t i = 0; i + 1 < labels; ++i) std::swap(order.ascending[i], order.ascending[i + rng.index(labels - i)]);
    return order;
}

std::optional<HistoryFixture> random_history_fixture(const MdpInstance& pbmdp, Rng& rng, double max_condition,
                                                     std::size_t max_length, std::size_t attempts) {
    const std::size_t d = pbmdp.symbolic_reward().labels;
    const RandomizedPolicy uniform{std::vector<Vector>(
        pbmdp.state_count(), Vector(pbmdp.action_count(), 1.0 / static_cast<double>(pbmdp.action_count())))};

    for (std::size_t attempt = 0; attempt < attempts; ++attempt) {
        std::vector<History> chosen;
        Matrix counts(d, 0);
        for (std::size_t draw = 0; draw < 50 * d && chosen.size() < d; ++draw) {
            History h = sample_history(pbmdp, uniform, rng.between(1, max_length), rng);
            if (std::find(chosen.begin(), chosen.end(), h) != chosen.end()) continue;
            const Vector r = history_count_vector(pbmdp, h);
            Matrix extended(d, chosen.size() + 1);
            for (std::size_t i = 0; i < d; ++i) {
                for (std::size_t j = 0; j < chosen.size(); ++j) extended(i, j) = counts(i, j);
                extended(i, chosen.size()) = r[i];
            }
            if (rank(extended) == chosen.size() + 1) {
                chosen.push_back(std::move(h));
                counts = std::move(extended);
            }
        }
        if (chosen.size() < d) continue;

        HistoryFixture fixture;
        fixture.values.resize(d);
        for (double& x : fixture.values) x = rng.uniform(0.0, 10.0);
        std::vector<std::pair<double, std::size_t>> ranked;
        for (std::size_t j = 0; j < d; ++j) ranked.emplace_back(dot(history_count_vector(pbmdp, chosen[j]), fixture.values), j);
        std::sort(ranked.begin(), ranked.end());
        bool strict = true;
        for (std::size_t j = 1; j < d; ++j)
            if (ranked[j].first - ranked[j - 1].first <= 1e-6 * (1.0 + std::abs(ranked[j].first))) strict = false;
        if (!strict) continue;
        for (const auto& [value, j] : ranked) fixture.ordered.histories.push_back(chosen[j]);

        try {
            fixture.basis = history_basis_matrix(pbmdp, fixture.ordered);
        } catch (const IndependenceError&) {
            continue;
        }
        if (fixture.basis.condition <= max_condition) return fixture;
    }
    return std::nullopt;
}

} // namespace pbmo
