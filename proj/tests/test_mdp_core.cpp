#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include <map>

using namespace pbmo;
using namespace testing;

namespace {

MdpInstance seed7_instance() {
    Rng rng(7);
    InstanceShape shape;
    shape.min_states = shape.max_states = 6;
    shape.min_actions = shape.max_actions = 3;
    return random_scalar_instance(rng, shape);
}

// 0 -> 1 -> 2 -> 2, reward 1 everywhere.
MdpInstance chain() {
    return MdpInstance(3, 1, deterministic_transitions({{1}, {2}, {2}}, 3), 0.5,
                       ScalarReward{{{1.0}, {1.0}, {1.0}}}, uniform(3));
}

// Two states, every move is a fair coin over both states.
MdpInstance coin_chain() {
    std::vector<std::vector<Vector>> t(2, std::vector<Vector>(1, Vector{0.5, 0.5}));
    return MdpInstance(2, 1, t, 0.5, ScalarReward{{{1.0}, {2.0}}}, uniform(2));
}

} // namespace

TEST_CASE("instance validation") {
    SUBCASE("transition row summing to 0.9 names the pair") {
        std::vector<std::vector<Vector>> t{{{0.5, 0.4}}, {{0.0, 1.0}}};
        try {
            MdpInstance(2, 1, t, 0.5, ScalarReward{{{0.0}, {0.0}}}, uniform(2));
            FAIL("expected a validation error");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("(s=0, a=0)") != std::string::npos);
        }
    }
    SUBCASE("discount of one") {
        CHECK_THROWS_AS(single_state_scalar({1.0}, 1.0), ValidationError);
    }
    SUBCASE("initial distribution with a zero entry") {
        CHECK_THROWS_AS(MdpInstance(2, 1, deterministic_transitions({{0}, {1}}, 2), 0.5,
                                    ScalarReward{{{0.0}, {0.0}}}, {1.0, 0.0}),
                        ValidationError);
    }
    SUBCASE("unused symbolic label") {
        CHECK_THROWS_AS(MdpInstance(1, 1, {{{1.0}}}, 0.5, SymbolicReward{2, {{0}}}, {1.0}), ValidationError);
    }
    SUBCASE("label out of range") {
        CHECK_THROWS_AS(MdpInstance(1, 1, {{{1.0}}}, 0.5, SymbolicReward{1, {{1}}}, {1.0}), ValidationError);
    }
    SUBCASE("randomized rows must sum to one") {
        const auto mdp = single_state_scalar({0.0, 1.0}, 0.5);
        CHECK_THROWS_AS(validate_policy(mdp, RandomizedPolicy{{{0.5, 0.4}}}), ValidationError);
        CHECK_THROWS_AS(validate_policy(mdp, MixedPolicy{{{{0}}, {{1}}}, {0.5, 0.6}}), ValidationError);
    }
}

TEST_CASE("evaluate_policy") {
    SUBCASE("geometric series") {
        const auto v = evaluate_policy(single_state_scalar({1.0}, 0.5), DeterministicPolicy{{0}});
        CHECK(v[0] == doctest::Approx(2.0).epsilon(1e-9));
    }
    SUBCASE("zero reward gives zero value") {
        Rng rng(3);
        auto mdp = random_scalar_instance(rng, {});
        std::vector<Vector> zero(mdp.state_count(), Vector(mdp.action_count(), 0.0));
        mdp = mdp.with_reward(ScalarReward{zero});
        for (double x : evaluate_policy(mdp, random_randomized_policy(mdp, rng))) CHECK(x == 0.0);
    }
    SUBCASE("rejects symbolic rewards and mixed policies") {
        CHECK_THROWS_AS(evaluate_policy(fixtures::two_label_choice(), DeterministicPolicy{{0}}), ValidationError);
        const auto mdp = single_state_scalar({0.0, 1.0}, 0.5);
        CHECK_THROWS_AS(evaluate_policy(mdp, MixedPolicy{{{{0}}, {{1}}}, {0.5, 0.5}}), ValidationError);
    }
    SUBCASE("matches the exact linear solve") {
        Rng rng(11);
        for (int trial = 0; trial < 20; ++trial) {
            const auto mdp = random_scalar_instance(rng, {});
            const auto pi = random_randomized_policy(mdp, rng);
            const auto v = evaluate_policy(mdp, pi, 1e-12);
            const auto oracle = exact_value(mdp, pi.probabilities, mdp.scalar_reward().values);
            CHECK(max_abs_diff(v, oracle) < 1e-9);
        }
    }
    SUBCASE("Monte Carlo estimate of the discounted return") {
        const auto mdp = seed7_instance();
        Rng prng(99);
        const auto pi = random_randomized_policy(mdp, prng);
        const double exact = mu_dot(mdp, evaluate_policy(mdp, pi, 1e-12));

        std::mt19937_64 gen(2024);
        auto draw = [&](const Vector& p) {
            std::discrete_distribution<std::size_t> d(p.begin(), p.end());
            return d(gen);
        };
        const std::size_t n = 100000;
        const std::size_t horizon = 400;
        double sum = 0.0, sum_sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t s = draw(mdp.initial_distribution());
            double ret = 0.0, disc = 1.0;
            for (std::size_t t = 0; t < horizon; ++t) {
                const std::size_t a = draw(pi.probabilities[s]);
                ret += disc * mdp.scalar_reward().values[s][a];
                disc *= mdp.discount();
                s = draw(mdp.transition(s, a));
            }
            sum += ret;
            sum_sq += ret * ret;
        }
        const double mean = sum / n;
        const double se = std::sqrt((sum_sq / n - mean * mean) / n);
        CHECK(std::abs(mean - exact) <= 3.0 * se);
    }
}

TEST_CASE("value_iteration") {
    SUBCASE("dominant action") {
        const auto r = value_iteration(single_state_scalar({0.0, 1.0}, 0.5));
        CHECK(r.values[0] == doctest::Approx(2.0).epsilon(1e-9));
        CHECK(r.policy.actions == std::vector<std::size_t>{1});
    }
    SUBCASE("ties go to the lowest action") {
        CHECK(value_iteration(single_state_scalar({1.0, 1.0, 0.5}, 0.5)).policy.actions[0] == 0);
    }
    SUBCASE("myopic case") {
        Rng rng(5);
        InstanceShape shape;
        shape.min_discount = shape.max_discount = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            const auto mdp = random_scalar_instance(rng, shape);
            const auto r = value_iteration(mdp);
            for (std::size_t s = 0; s < mdp.state_count(); ++s) {
                const auto& row = mdp.scalar_reward().values[s];
                CHECK(r.values[s] == doctest::Approx(*std::max_element(row.begin(), row.end())));
            }
        }
    }
    SUBCASE("equals the best enumerated deterministic policy") {
        Rng rng(17);
        InstanceShape shape;
        shape.min_states = shape.max_states = 5;
        shape.min_actions = 2;
        for (int trial = 0; trial < 5; ++trial) {
            const auto mdp = random_scalar_instance(rng, shape);
            const auto r = value_iteration(mdp, 1e-12);
            Vector best(mdp.state_count(), -1e300);
            for (const auto& t : all_action_tuples(mdp.state_count(), mdp.action_count())) {
                const auto v = exact_value(mdp, deterministic_probs(mdp, t), mdp.scalar_reward().values);
                for (std::size_t s = 0; s < v.size(); ++s) best[s] = std::max(best[s], v[s]);
            }
            CHECK(max_abs_diff(r.values, best) < 1e-9);
        }
    }
    SUBCASE("contraction and greedy evaluation") {
        Rng rng(23);
        for (int trial = 0; trial < 20; ++trial) {
            const auto mdp = random_scalar_instance(rng, {});
            const double tol = 1e-9;
            const auto r = value_iteration(mdp, tol);
            for (std::size_t k = 1; k < r.increments.size(); ++k)
                CHECK(r.increments[k] <= mdp.discount() * r.increments[k - 1] + 1e-12);
            const auto v = evaluate_policy(mdp, r.policy, tol);
            CHECK(max_abs_diff(v, r.values) <= 2.0 * tol / (1.0 - mdp.discount()));
            CHECK(greedy_policy(mdp, r.values) == r.policy);
        }
    }
}

TEST_CASE("history_value") {
    const auto one = single_state_scalar({1.0}, 0.5);
    SUBCASE("two unit rewards") {
        CHECK(history_value(one, History{{0, 0, 0}, {0, 0}}) == 1.5);
    }
    SUBCASE("empty history") {
        CHECK(history_value(one, History{{0}, {}}) == 0.0);
    }
    SUBCASE("invalid transition") {
        const auto mdp = chain();
        CHECK_THROWS_AS(history_value(mdp, History{{0, 2}, {0}}), ValidationError);
    }
    SUBCASE("direct summation and additivity") {
        const auto mdp = seed7_instance();
        Rng prng(1);
        const auto pi = random_randomized_policy(mdp, prng);
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto h = sample_history(mdp, pi, 3, seed);
            double oracle = 0.0, disc = 1.0;
            for (std::size_t i = 0; i < h.length(); ++i) {
                oracle += disc * mdp.scalar_reward().values[h.states[i]][h.actions[i]];
                disc *= mdp.discount();
            }
            CHECK(std::abs(history_value(mdp, h) - oracle) < 1e-12);

            const auto tail = sample_history(mdp, pi, 2, seed + 100, h.last_state());
            const double joined = history_value(mdp, concatenate(h, tail));
            const double parts = history_value(mdp, h) + std::pow(mdp.discount(), 3) * history_value(mdp, tail);
            CHECK(std::abs(joined - parts) < 1e-12);
        }
    }
}

TEST_CASE("sample_history") {
    SUBCASE("deterministic chain") {
        for (std::uint64_t seed : {1u, 2u, 99u}) {
            const auto h = sample_history(chain(), DeterministicPolicy{{0, 0, 0}}, 3, seed, 0);
            CHECK(h.states == std::vector<std::size_t>{0, 1, 2, 2});
        }
    }
    SUBCASE("same seed, same history") {
        const auto mdp = seed7_instance();
        Rng prng(4);
        const auto pi = random_randomized_policy(mdp, prng);
        CHECK(sample_history(mdp, pi, 10, 42) == sample_history(mdp, pi, 10, 42));
    }
    SUBCASE("visit frequencies match enumeration") {
        const auto mdp = seed7_instance();
        Rng prng(8);
        const auto pi = random_randomized_policy(mdp, prng);
        const std::size_t horizon = 3;
        const auto exact = enumerate_histories(mdp, pi, horizon);
        std::vector<Vector> marginal(horizon + 1, Vector(mdp.state_count(), 0.0));
        std::map<History, double> law;
        for (const auto& wh : exact) {
            law[wh.history] = wh.probability;
            for (std::size_t t = 0; t <= horizon; ++t) marginal[t][wh.history.states[t]] += wh.probability;
        }
        const std::size_t n = 100000;
        std::vector<Vector> freq(horizon + 1, Vector(mdp.state_count(), 0.0));
        std::map<History, double> counts;
        Rng rng(12345);
        for (std::size_t i = 0; i < n; ++i) {
            const auto h = sample_history(mdp, pi, horizon, rng);
            counts[h] += 1.0;
            for (std::size_t t = 0; t <= horizon; ++t) freq[t][h.states[t]] += 1.0 / n;
        }
        for (std::size_t t = 0; t <= horizon; ++t)
            for (std::size_t s = 0; s < mdp.state_count(); ++s) {
                const double p = marginal[t][s];
                CHECK(std::abs(freq[t][s] - p) <= 3.0 * std::sqrt(p * (1 - p) / n) + 1e-12);
            }
        // Every sampled history is one the enumeration assigns positive mass.
        for (const auto& [h, c] : counts) CHECK(law.count(h) == 1);
        // Total variation between the sampled and exact path laws.
        double tv = 0.0;
        for (const auto& [h, p] : law) tv += std::abs((counts.count(h) ? counts[h] / n : 0.0) - p);
        CHECK(0.5 * tv < 0.05);
    }
}

TEST_CASE("enumerate_histories") {
    SUBCASE("deterministic instance gives one path") {
        const auto hs = enumerate_histories(chain(), DeterministicPolicy{{0, 0, 0}}, 4, {.start = 0});
        REQUIRE(hs.size() == 1);
        CHECK(hs[0].probability == 1.0);
    }
    SUBCASE("coin chain") {
        const auto hs = enumerate_histories(coin_chain(), DeterministicPolicy{{0, 0}}, 2, {.start = 0});
        REQUIRE(hs.size() == 4);
        for (const auto& wh : hs) CHECK(wh.probability == 0.25);
    }
    SUBCASE("probabilities sum to one") {
        Rng rng(31);
        for (int trial = 0; trial < 20; ++trial) {
            const auto mdp = random_scalar_instance(rng, {});
            const auto hs = enumerate_histories(mdp, random_randomized_policy(mdp, rng), 3);
            double total = 0.0;
            for (const auto& wh : hs) {
                CHECK(wh.probability > 0.0);
                total += wh.probability;
            }
            CHECK(std::abs(total - 1.0) < 1e-9);
        }
    }
    SUBCASE("cap exceeded") {
        CHECK_THROWS_AS(enumerate_histories(coin_chain(), DeterministicPolicy{{0, 0}}, 10, {.cap = 100, .start = std::nullopt}),
                        CapExceededError);
    }
}

TEST_CASE("enumerate_deterministic_policies") {
    auto shaped = [](std::size_t s, std::size_t a) {
        std::vector<std::vector<std::size_t>> next(s, std::vector<std::size_t>(a, 0));
        return MdpInstance(s, a, deterministic_transitions(next, s), 0.5,
                           ScalarReward{std::vector<Vector>(s, Vector(a, 0.0))}, uniform(s));
    };
    auto actions_of = [](const std::vector<DeterministicPolicy>& ps) {
        std::vector<std::vector<std::size_t>> out;
        for (const auto& p : ps) out.push_back(p.actions);
        return out;
    };
    CHECK(enumerate_deterministic_policies(shaped(2, 2)).size() == 4);
    CHECK(enumerate_deterministic_policies(shaped(1, 3)).size() == 3);
    const auto eight = enumerate_deterministic_policies(shaped(3, 2));
    CHECK(actions_of(eight) == all_action_tuples(3, 2));
    CHECK(std::adjacent_find(eight.begin(), eight.end(), [](auto& a, auto& b) { return !(a < b); }) == eight.end());
    CHECK(deterministic_policy_count(shaped(3, 2)) == std::optional<std::size_t>(8));
    CHECK_THROWS_AS(enumerate_deterministic_policies(shaped(3, 2), 7), CapExceededError);
}

TEST_CASE("truncation horizon bounds the tail relative to the value scale") {
    for (double g : {0.0, 0.3, 0.5, 0.9, 0.95}) {
        const std::size_t h = truncation_horizon(g, 1e-6);
        CHECK(std::pow(g, static_cast<double>(h)) < 1e-6);
        if (h > 1) CHECK(std::pow(g, static_cast<double>(h - 1)) >= 1e-6);
    }
    CHECK_THROWS_AS(truncation_horizon(0.5, 0.0), ValidationError);
}
