#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace pbmo;
using namespace testing;

namespace {

// One state; action k yields label k.
MdpInstance one_state_labels(std::size_t d, double gamma) {
    std::vector<std::size_t> labels(d);
    for (std::size_t k = 0; k < d; ++k) labels[k] = k;
    std::vector<std::vector<Vector>> t(1, std::vector<Vector>(d, Vector{1.0}));
    return MdpInstance(1, d, t, gamma, SymbolicReward{d, {labels}}, {1.0});
}

RewardOrder identity_order(std::size_t d) {
    RewardOrder o;
    for (std::size_t k = 0; k < d; ++k) o.ascending.push_back(k);
    return o;
}

// Large enough that every one of d labels can appear.
InstanceShape shape_for(std::size_t d, std::size_t max_states = 4) {
    InstanceShape s;
    s.min_states = 2;
    s.max_states = max_states;
    s.min_actions = d > 4 ? 3 : 2;
    s.max_actions = 3;
    return s;
}

} // namespace

TEST_CASE("counting reward") {
    SUBCASE("one-hot per label") {
        const auto r = counting_reward(one_state_labels(3, 0.5));
        CHECK(r.dimension == 3);
        CHECK(r.values[0][1] == Vector{0, 1, 0});
    }
    SUBCASE("single label") {
        const auto r = counting_reward(MdpInstance(2, 1, deterministic_transitions({{1}, {0}}, 2), 0.5,
                                                   SymbolicReward{1, {{0}, {0}}}, uniform(2)));
        for (const auto& row : r.values)
            for (const auto& v : row) CHECK(v == Vector{1});
    }
    SUBCASE("column sums equal label tallies") {
        Rng rng(3);
        for (int trial = 0; trial < 20; ++trial) {
            const std::size_t d = 1 + rng.index(4);
            const auto mdp = random_symbolic_instance(rng, shape_for(d, 10), d);
            const auto r = counting_reward(mdp);
            Vector sums(d, 0.0), tally(d, 0.0);
            for (std::size_t s = 0; s < mdp.state_count(); ++s)
                for (std::size_t a = 0; a < mdp.action_count(); ++a) {
                    for (std::size_t k = 0; k < d; ++k) sums[k] += r.values[s][a][k];
                    tally[mdp.symbolic_reward().values[s][a]] += 1.0;
                }
            CHECK(sums == tally);
        }
    }
}

TEST_CASE("decumulative vectors") {
    CHECK(decumulative(Vector{1, 2, 3}) == Vector{6, 5, 3});
    CHECK(decumulative(Vector{0, 1, 0}) == Vector{1, 1, 0});
    Rng rng(5);
    for (int n = 0; n < 200; ++n) {
        Vector u(5), v(5), sum(5);
        for (std::size_t k = 0; k < 5; ++k) {
            u[k] = std::floor(rng.uniform(-50, 50));
            v[k] = std::floor(rng.uniform(-50, 50));
            sum[k] = u[k] + v[k];
        }
        const auto du = decumulative(u), dv = decumulative(v), ds = decumulative(sum);
        for (std::size_t k = 0; k < 5; ++k) CHECK(ds[k] == du[k] + dv[k]);
        CHECK(first_difference(du) == u);
    }
    CHECK(difference_weights(Vector{0, 1, 5}) == Vector{0, 1, 4});
}

TEST_CASE("ordered reward transform") {
    const auto mdp = one_state_labels(3, 0.5);
    const auto t = ordered_reward_transform(mdp, identity_order(3));
    CHECK(t.vector_reward().values[0][0] == Vector{1, 0, 0});
    CHECK(t.vector_reward().values[0][1] == Vector{1, 1, 0});
    CHECK(t.vector_reward().values[0][2] == Vector{1, 1, 1});

    SUBCASE("order is applied before the transform") {
        RewardOrder o{{2, 0, 1}}; // x_3 < x_1 < x_2
        const auto c = canonicalize(mdp, o);
        CHECK(c.symbolic_reward().values[0] == std::vector<std::size_t>{1, 2, 0});
        CHECK_THROWS_AS(canonicalize(mdp, RewardOrder{{0, 0, 1}}), ValidationError);
        CHECK_THROWS_AS(canonicalize(mdp, RewardOrder{{0, 1}}), ValidationError);
    }
    SUBCASE("statewise values are decumulated counting values") {
        Rng rng(9);
        for (int trial = 0; trial < 20; ++trial) {
            const std::size_t d = 1 + rng.index(4);
            const auto pb = random_symbolic_instance(rng, shape_for(d), d);
            const auto order = random_order(d, rng);
            const auto canon = canonicalize(pb, order);
            const auto pi = random_randomized_policy(pb, rng);
            const auto vec = vector_evaluate(ordered_reward_transform(pb, order), pi, 1e-12);
            const auto bar = vector_evaluate(canon.with_reward(counting_reward(canon)), pi, 1e-12);
            for (std::size_t s = 0; s < pb.state_count(); ++s)
                CHECK(max_abs_diff(vec.values[s], decumulative(bar.values[s])) < 1e-9);
        }
    }
}

TEST_CASE("history count vectors") {
    const auto mdp = one_state_labels(2, 0.5);
    CHECK(history_count_vector(mdp, History{{0, 0}, {1}}) == Vector{0, 1});
    CHECK(history_count_vector(mdp, History{{0}, {}}) == Vector{0, 0});
    const History a{{0, 0, 0}, {0, 1}}, b{{0, 0}, {1}};
    const auto joined = history_count_vector(mdp, concatenate(a, b));
    const auto ra = history_count_vector(mdp, a), rb = history_count_vector(mdp, b);
    for (std::size_t k = 0; k < 2; ++k) CHECK(joined[k] == ra[k] + 0.25 * rb[k]);
}

TEST_CASE("history basis matrix") {
    const auto mdp = one_state_labels(3, 0.5);
    SUBCASE("pure-label histories give the identity") {
        OrderedHistories oh{{History{{0, 0}, {0}}, History{{0, 0}, {1}}, History{{0, 0}, {2}}}};
        const auto b = history_basis_matrix(mdp, oh);
        CHECK(b.h == Matrix::identity(3));
        CHECK(b.h_inv == Matrix::identity(3));
        CHECK(ordered_history_transform(mdp, oh) == ordered_reward_transform(mdp, identity_order(3)));
    }
    SUBCASE("duplicated history is singular") {
        OrderedHistories oh{{History{{0, 0}, {0}}, History{{0, 0}, {1}}, History{{0, 0}, {1}}}};
        CHECK_THROWS_AS(history_basis_matrix(mdp, oh), IndependenceError);
    }
    SUBCASE("wrong number of histories") {
        OrderedHistories oh{{History{{0, 0}, {0}}}};
        CHECK_THROWS_AS(history_basis_matrix(mdp, oh), ValidationError);
    }
    SUBCASE("random independent histories invert cleanly") {
        Rng rng(11);
        int found = 0;
        for (int trial = 0; trial < 40; ++trial) {
            const std::size_t d = 2 + rng.index(3);
            const auto pb = random_symbolic_instance(rng, shape_for(d), d);
            const auto fx = random_history_fixture(pb, rng);
            if (!fx) continue;
            ++found;
            const Matrix p = fx->basis.h * fx->basis.h_inv;
            Matrix r = p;
            for (std::size_t i = 0; i < d; ++i) r(i, i) -= 1.0;
            CHECK(inf_norm(r) <= 1e-8);
            // columns are the count vectors, in order
            for (std::size_t i = 0; i < d; ++i)
                CHECK(max_abs_diff(fx->basis.h.column(i), history_count_vector(pb, fx->ordered.histories[i])) == 0.0);
            // history values round-trip through the inverse
            const auto r_vals = history_values(fx->basis, fx->values);
            CHECK(max_abs_diff(values_from_history_values(fx->basis, r_vals), fx->values) < 1e-8);
        }
        CHECK(found >= 20);
    }
    SUBCASE("single label: reward scales by the inverse count") {
        const auto pb = MdpInstance(2, 1, deterministic_transitions({{1}, {0}}, 2), 0.5, SymbolicReward{1, {{0}, {0}}},
                                    uniform(2));
        const History h{{0, 1, 0}, {0, 0}}; // count 1 + 0.5
        const auto t = ordered_history_transform(pb, OrderedHistories{{h}});
        CHECK(t.vector_reward().values[0][0][0] == doctest::Approx(1.0 / 1.5));
        const Vector x{3.0};
        const Policy pi = DeterministicPolicy{{0, 0}};
        const double r1 = 1.5 * 3.0;
        const auto v = evaluate_policy(substitute_values(pb, x), pi, 1e-12);
        const auto vv = vector_evaluate(t, pi, 1e-12);
        for (std::size_t s = 0; s < 2; ++s) CHECK(std::abs(v[s] - r1 * vv.values[s][0]) < 1e-9);
        CHECK(verify_lemma2(pb, OrderedHistories{{h}}, x, pi).max_residual() < 1e-9);
    }
}

TEST_CASE("value decomposition through ordered rewards") {
    SUBCASE("hand example") {
        // picks the action labelled x_2; other labels exist on unused actions
        const auto pb = one_state_labels(3, 0.5);
        const Vector x{0, 1, 5};
        const Policy pi = DeterministicPolicy{{1}};
        const auto bar = vector_evaluate(pb.with_reward(counting_reward(pb)), pi, 1e-12);
        CHECK(max_abs_diff(bar.values[0], {0, 2, 0}) < 1e-9);
        const auto vec = vector_evaluate(ordered_reward_transform(pb, identity_order(3)), pi, 1e-12);
        CHECK(max_abs_diff(vec.values[0], {2, 2, 0}) < 1e-9);
        const auto r = verify_lemma1(pb, identity_order(3), x, pi, 1e-12);
        CHECK(r.max_residual() < 1e-9);
    }
    SUBCASE("non-increasing values are rejected") {
        const auto pb = one_state_labels(3, 0.5);
        CHECK_THROWS_AS(verify_lemma1(pb, identity_order(3), Vector{1, 1, 2}, DeterministicPolicy{{0}}),
                        ValidationError);
        CHECK_THROWS_AS(verify_lemma1(pb, identity_order(3), Vector{1, 2}, DeterministicPolicy{{0}}), ValidationError);
    }
    SUBCASE("random instances") {
        Rng rng(13);
        for (int trial = 0; trial < 50; ++trial) {
            const std::size_t d = 1 + rng.index(5);
            const auto pb = random_symbolic_instance(rng, shape_for(d, 10), d);
            Vector x = sample_increasing_values(d, rng, -10, 10);
            const auto r = verify_lemma1(pb, random_order(d, rng), x, random_deterministic_policy(pb, rng));
            CHECK(r.max_residual() <= 1e-8);
        }
    }
    SUBCASE("identity basis matches the ordered reward decomposition") {
        const auto pb = one_state_labels(3, 0.7);
        OrderedHistories oh{{History{{0, 0}, {0}}, History{{0, 0}, {1}}, History{{0, 0}, {2}}}};
        const Vector x{1, 2, 4};
        for (std::size_t a = 0; a < 3; ++a) {
            const Policy pi = DeterministicPolicy{{a}};
            const auto r2 = verify_lemma2(pb, oh, x, pi, 1e-12);
            const auto r1 = verify_lemma1(pb, identity_order(3), x, pi, 1e-12);
            CHECK(r2.max_residual() < 1e-9);
            CHECK(std::abs(r2.max_residual() - r1.max_residual()) < 1e-9);
        }
    }
    SUBCASE("history ranking contradicting the values is flagged") {
        const auto pb = one_state_labels(2, 0.5);
        OrderedHistories oh{{History{{0, 0}, {1}}, History{{0, 0}, {0}}}};
        CHECK_THROWS_AS(verify_lemma2(pb, oh, Vector{1, 2}, DeterministicPolicy{{0}}), ValidationError);
    }
    SUBCASE("random history fixtures") {
        Rng rng(17);
        int checked = 0;
        for (int trial = 0; trial < 40; ++trial) {
            const std::size_t d = 2 + rng.index(3);
            const auto pb = random_symbolic_instance(rng, shape_for(d), d);
            const auto fx = random_history_fixture(pb, rng);
            if (!fx) continue;
            ++checked;
            const auto r = verify_lemma2(pb, fx->ordered, fx->values, random_randomized_policy(pb, rng));
            CHECK(r.max_residual() <= 1e-6);
        }
        CHECK(checked >= 20);
    }
}

TEST_CASE("dominance soundness") {
    SUBCASE("componentwise-dominant action passes") {
        const auto pb = one_state_labels(3, 0.5);
        const auto t = ordered_reward_transform(pb, identity_order(3));
        const auto rep = dominance_soundness_check(pb, t, {{0, 1, 5}, {-3, 2, 2.5}});
        CHECK(rep.passed);
        CHECK(rep.dominant_pairs > 0);
    }
    SUBCASE("decreasing values break it") {
        const auto pb = fixtures::two_label_choice();
        const auto t = ordered_reward_transform(pb, identity_order(2));
        const auto rep = dominance_soundness_check(pb, t, {{2, 1}});
        CHECK_FALSE(rep.passed);
        CHECK(rep.counterexample.has_value());
    }
    SUBCASE("random instances with increasing values") {
        Rng rng(19);
        for (int trial = 0; trial < 30; ++trial) {
            const std::size_t d = 1 + rng.index(4);
            const auto pb = random_symbolic_instance(rng, shape_for(d), d);
            const auto order = random_order(d, rng);
            const auto canon = canonicalize(pb, order);
            std::vector<Vector> xs;
            for (int k = 0; k < 20; ++k) xs.push_back(sample_increasing_values(d, rng, -10, 10));
            CHECK(dominance_soundness_check(canon, ordered_reward_transform(pb, order), xs).passed);
        }
    }
}
