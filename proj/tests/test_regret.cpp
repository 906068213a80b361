#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include <cstring>
#include <limits>

using namespace pbmo;
using namespace testing;

namespace {

// Best objective over basic solutions: every choice of n linearly
// independent constraints (rows and finite bounds, equalities always
// included) is solved and kept when feasible. Requires finite bounds.
struct VertexOracle {
    bool feasible = false;
    double objective = 0.0;
};

VertexOracle vertex_oracle(const LinearProgram& lp) {
    const std::size_t n = lp.variable_count();
    struct Plane {
        Vector a;
        double b;
        bool equality;
    };
    std::vector<Plane> planes;
    for (const auto& r : lp.rows) planes.push_back({r.coefficients, r.rhs, r.sense == RowSense::Equal});
    for (std::size_t j = 0; j < n; ++j) {
        Vector e(n, 0.0);
        e[j] = 1.0;
        planes.push_back({e, lp.lower[j], false});
        planes.push_back({e, lp.upper[j], false});
    }
    auto feasible = [&](const Vector& x) {
        for (std::size_t j = 0; j < n; ++j)
            if (x[j] < lp.lower[j] - 1e-7 || x[j] > lp.upper[j] + 1e-7) return false;
        for (const auto& r : lp.rows) {
            double v = 0.0;
            for (std::size_t j = 0; j < n; ++j) v += r.coefficients[j] * x[j];
            if (r.sense == RowSense::LessEqual && v > r.rhs + 1e-7) return false;
            if (r.sense == RowSense::GreaterEqual && v < r.rhs - 1e-7) return false;
            if (r.sense == RowSense::Equal && std::abs(v - r.rhs) > 1e-7) return false;
        }
        return true;
    };
    VertexOracle best;
    const double sign = lp.sense == ObjectiveSense::Maximize ? 1.0 : -1.0;
    // iterate over n-subsets of planes
    std::vector<bool> mask(planes.size(), false);
    std::fill(mask.end() - static_cast<std::ptrdiff_t>(n), mask.end(), true);
    do {
        std::vector<Vector> a;
        Vector b;
        bool eq_missing = false;
        for (std::size_t k = 0; k < planes.size(); ++k) {
            if (mask[k]) {
                a.push_back(planes[k].a);
                b.push_back(planes[k].b);
            } else if (planes[k].equality) {
                eq_missing = true;
            }
        }
        if (eq_missing) continue;
        // rank check via elimination on a copy
        auto m = a;
        bool singular = false;
        for (std::size_t c = 0; c < n && !singular; ++c) {
            std::size_t p = c;
            for (std::size_t r = c + 1; r < n; ++r)
                if (std::abs(m[r][c]) > std::abs(m[p][c])) p = r;
            if (std::abs(m[p][c]) < 1e-9) singular = true;
            std::swap(m[c], m[p]);
            for (std::size_t r = c + 1; r < n && !singular; ++r) {
                const double f = m[r][c] / m[c][c];
                for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
            }
        }
        if (singular) continue;
        const Vector x = gauss_solve(a, b);
        if (!feasible(x)) continue;
        double obj = 0.0;
        for (std::size_t j = 0; j < n; ++j) obj += lp.objective[j] * x[j];
        if (!best.feasible || sign * obj > sign * best.objective) best = {true, obj};
    } while (std::next_permutation(mask.begin(), mask.end()));
    return best;
}

MdpInstance symmetric_choice() { return single_state_vector({{1, 0}, {0, 1}}, 0.0); }

InstanceShape shape(std::size_t max_states, std::size_t max_actions) {
    InstanceShape s;
    s.min_states = 2;
    s.max_states = max_states;
    s.min_actions = 2;
    s.max_actions = max_actions;
    s.max_discount = 0.9;
    return s;
}

double max_gap(const Vector& ideal, const Vector& v) {
    double g = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.size(); ++i) g = std::max(g, ideal[i] - v[i]);
    return g;
}

} // namespace

TEST_CASE("linear programs") {
    SUBCASE("single bounded variable") {
        LinearProgram lp(1, ObjectiveSense::Maximize);
        lp.objective = {1.0};
        lp.add_row({1.0}, RowSense::LessEqual, 3.0);
        const auto s = solve_lp(lp);
        REQUIRE(s.status == LpStatus::Optimal);
        CHECK(s.objective == doctest::Approx(3.0));
    }
    SUBCASE("infeasible pair") {
        LinearProgram lp(1, ObjectiveSense::Maximize);
        lp.objective = {1.0};
        lp.add_row({1.0}, RowSense::LessEqual, -1.0);
        CHECK(solve_lp(lp).status == LpStatus::Infeasible);
    }
    SUBCASE("unbounded ray") {
        LinearProgram lp(2, ObjectiveSense::Maximize);
        lp.objective = {1.0, 1.0};
        lp.add_row({1.0, -1.0}, RowSense::LessEqual, 1.0);
        CHECK(solve_lp(lp).status == LpStatus::Unbounded);
    }
    SUBCASE("random boxed programs against vertex enumeration") {
        Rng rng(29);
        int optimal = 0, infeasible = 0;
        for (int trial = 0; trial < 150; ++trial) {
            const std::size_t n = 1 + rng.index(4), m = rng.index(5);
            LinearProgram lp(n, rng.uniform() < 0.5 ? ObjectiveSense::Maximize : ObjectiveSense::Minimize);
            for (std::size_t j = 0; j < n; ++j) {
                lp.objective[j] = std::round(rng.uniform(-5, 5));
                lp.lower[j] = rng.uniform() < 0.3 ? -2.0 : 0.0;
                lp.upper[j] = std::round(rng.uniform(1, 6));
            }
            for (std::size_t r = 0; r < m; ++r) {
                Vector a(n);
                for (auto& x : a) x = std::round(rng.uniform(-4, 4));
                const double kind = rng.uniform();
                const RowSense sense = kind < 0.5 ? RowSense::LessEqual : kind < 0.8 ? RowSense::GreaterEqual : RowSense::Equal;
                lp.add_row(a, sense, std::round(rng.uniform(-6, 10)));
            }
            const auto s = solve_lp(lp);
            const auto o = vertex_oracle(lp);
            if (!o.feasible) {
                CHECK(s.status == LpStatus::Infeasible);
                ++infeasible;
            } else {
                REQUIRE(s.status == LpStatus::Optimal);
                CHECK(std::abs(s.objective - o.objective) < 1e-6);
                CHECK(max_violation(lp, s.x) < 1e-7);
                ++optimal;
            }
        }
        CHECK(optimal > 50);
        CHECK(infeasible > 0);
    }
    SUBCASE("fractional knapsack with twenty variables") {
        Rng rng(31);
        for (int trial = 0; trial < 30; ++trial) {
            const std::size_t n = 20;
            LinearProgram lp(n, ObjectiveSense::Maximize);
            Vector weight(n);
            for (std::size_t j = 0; j < n; ++j) {
                lp.objective[j] = rng.uniform(0.1, 10);
                weight[j] = rng.uniform(0.1, 5);
                lp.upper[j] = 1.0;
            }
            const double capacity = rng.uniform(1, 30);
            lp.add_row(weight, RowSense::LessEqual, capacity);
            // greedy by value density is optimal for the relaxation
            std::vector<std::size_t> order(n);
            for (std::size_t j = 0; j < n; ++j) order[j] = j;
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return lp.objective[a] / weight[a] > lp.objective[b] / weight[b];
            });
            double room = capacity, best = 0.0;
            for (std::size_t j : order) {
                const double take = std::min(1.0, room / weight[j]);
                best += take * lp.objective[j];
                room -= take * weight[j];
                if (room <= 0) break;
            }
            const auto s = solve_lp(lp);
            REQUIRE(s.status == LpStatus::Optimal);
            CHECK(std::abs(s.objective - best) < 1e-6);
        }
    }
    SUBCASE("identical inputs give bit-identical solutions") {
        Rng rng(37);
        LinearProgram lp(6, ObjectiveSense::Minimize);
        for (auto& c : lp.objective) c = rng.uniform(-1, 1);
        for (auto& u : lp.upper) u = 3.0;
        for (int r = 0; r < 4; ++r) {
            Vector a(6);
            for (auto& x : a) x = rng.uniform(-1, 1);
            lp.add_row(a, RowSense::LessEqual, rng.uniform(0, 2));
        }
        const auto a = solve_lp(lp), b = solve_lp(lp);
        REQUIRE(a.x.size() == b.x.size());
        CHECK(std::memcmp(a.x.data(), b.x.data(), a.x.size() * sizeof(double)) == 0);
        CHECK(a.pivots == b.pivots);
    }
}

TEST_CASE("ideal point") {
    CHECK(ideal_point(symmetric_choice()).point == Vector{1, 1});
    const auto one = single_state_vector({{0.3, 0.7}}, 0.5);
    CHECK(max_abs_diff(ideal_point(one).point, {0.6, 1.4}) < 1e-9);
    Rng rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        const auto mdp = random_vector_instance(rng, shape(4, 3), 3);
        const auto all = brute_force_vectors(mdp);
        const auto ideal = ideal_point(mdp).point;
        for (std::size_t i = 0; i < 3; ++i) {
            double best = -1e300;
            for (const auto& v : all) best = std::max(best, v[i]);
            CHECK(std::abs(ideal[i] - best) < 1e-8);
        }
    }
}

TEST_CASE("Chebyshev-optimal policy") {
    SUBCASE("symmetric choice splits evenly") {
        const auto sol = chebyshev_optimal(symmetric_choice());
        CHECK(sol.regret == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(std::abs(sol.policy.probabilities[0][0] - 0.5) < 1e-9);
        CHECK(std::abs(sol.policy.probabilities[0][1] - 0.5) < 1e-9);
        CHECK(sol.active == std::vector<std::size_t>{0, 1});
    }
    SUBCASE("one objective is scalar-optimal") {
        Rng rng(43);
        for (int trial = 0; trial < 10; ++trial) {
            const auto mdp = random_vector_instance(rng, shape(4, 3), 1);
            const auto sol = chebyshev_optimal(mdp);
            CHECK(std::abs(sol.regret) < 1e-9);
            const auto scalar = mdp.with_reward(ScalarReward{coordinate(mdp, 0)});
            const double opt = mu_dot(scalar, value_iteration(scalar, 1e-12).values);
            CHECK(std::abs(mu_dot(scalar, evaluate_policy(scalar, sol.policy, 1e-12)) - opt) < 1e-8);
        }
    }
    SUBCASE("never worse than the best deterministic policy") {
        Rng rng(47);
        InstanceShape s = shape(4, 3);
        s.min_states = 4;
        for (int trial = 0; trial < 20; ++trial) {
            const auto mdp = random_vector_instance(rng, s, 2);
            const auto sol = chebyshev_optimal(mdp);
            const auto all = brute_force_vectors(mdp);
            double best = 1e300;
            for (const auto& v : all) best = std::min(best, max_gap(sol.ideal.point, v));
            CHECK(sol.regret <= best + 1e-8);
            CHECK(flow_residual(mdp, sol.occupancy) <= 1e-8);
            double mass = 0.0;
            for (double x : sol.occupancy.values) {
                CHECK(x >= -1e-12);
                mass += x;
            }
            CHECK(std::abs(mass - 1.0 / (1.0 - mdp.discount())) < 1e-8);
            // the induced policy achieves the LP value
            Vector v(2);
            for (std::size_t i = 0; i < 2; ++i)
                v[i] = mu_dot(mdp, exact_value(mdp, sol.policy.probabilities, coordinate(mdp, i)));
            CHECK(std::abs(chebyshev_gap(sol.ideal.point, v) - sol.regret) < 1e-8);
        }
    }
}

TEST_CASE("minimax regret") {
    SUBCASE("symmetric choice") {
        const auto r = minimax_regret(symmetric_choice());
        CHECK(r.value == doctest::Approx(0.5).epsilon(1e-9));
        REQUIRE(r.hypercube_value.has_value());
        CHECK(*r.hypercube_value >= r.value - 1e-12);
    }
    SUBCASE("one objective") {
        CHECK(std::abs(minimax_regret(single_state_vector({{1}, {3}}, 0.5)).value) < 1e-9);
    }
    SUBCASE("equals the Chebyshev value on random instances") {
        Rng rng(53);
        for (int trial = 0; trial < 20; ++trial) {
            const auto mdp = random_vector_instance(rng, shape(4, 3), 2 + rng.index(2));
            const auto r = minimax_regret(mdp);
            CHECK(std::abs(r.value - r.solution.regret) < 1e-8);
        }
    }
    SUBCASE("simplex regret is the clipped worst shortfall") {
        CHECK(simplex_regret(Vector{1, 1}, Vector{0.25, 0.5}) == 0.75);
        CHECK(simplex_regret(Vector{1, 1}, Vector{1, 1}) == 0.0);
        CHECK(chebyshev_gap(Vector{1, 1}, Vector{0.25, 0.5}) == 0.75);
    }
    SUBCASE("hypercube value is skipped past the cap") {
        Rng rng(55);
        const auto mdp = random_vector_instance(rng, shape(4, 3), 2);
        CHECK_FALSE(minimax_regret(mdp, 1e-11, 1).hypercube_value.has_value());
    }
}

TEST_CASE("Chebyshev and regret objectives coincide") {
    SUBCASE("symmetric instance") {
        const auto r = verify_lemma3(symmetric_choice());
        CHECK(r.passed);
        CHECK(std::abs(r.chebyshev_min - 0.5) < 1e-9);
        CHECK(std::abs(r.regret_min - 0.5) < 1e-9);
        CHECK(r.chebyshev_argmin == r.regret_argmin);
    }
    SUBCASE("single policy") {
        const auto r = verify_lemma3(single_state_vector({{0.2, 0.4}}, 0.5));
        CHECK(r.passed);
        CHECK(r.policies == 1);
        CHECK(std::abs(r.chebyshev_min) < 1e-9);
    }
    SUBCASE("random transformed instances") {
        Rng rng(59);
        for (int trial = 0; trial < 30; ++trial) {
            const std::size_t d = 2 + rng.index(3);
            InstanceShape s = shape(5, 3);
            s.min_actions = d > 4 ? 3 : 2;
            const auto pb = random_symbolic_instance(rng, s, d);
            const auto mdp = ordered_reward_transform(pb, random_order(d, rng));
            const auto r = verify_lemma3(mdp, 1e-8, kDefaultPolicyCap, 1 + trial);
            CHECK(r.passed);
            CHECK(r.value_gap <= 1e-8);
            CHECK(r.lp_excess <= 1e-8);
        }
    }
}

TEST_CASE("occupancy measures") {
    SUBCASE("deterministic policy round trip") {
        Rng rng(61);
        for (int trial = 0; trial < 20; ++trial) {
            const auto mdp = random_scalar_instance(rng, shape(5, 3));
            const auto pi = random_deterministic_policy(mdp, rng);
            const auto back = occupancy_to_policy(policy_to_occupancy(mdp, pi));
            // mu > 0 makes every state reachable
            CHECK(back == to_randomized(mdp, pi));
            CHECK(flow_residual(mdp, policy_to_occupancy(mdp, pi)) < 1e-10);
        }
    }
    SUBCASE("uniform policy on a symmetric two-state chain") {
        const double g = 0.6;
        const auto mdp = MdpInstance(2, 2, deterministic_transitions({{1, 1}, {0, 0}}, 2), g,
                                     ScalarReward{{{0, 0}, {0, 0}}}, uniform(2));
        const auto x = policy_to_occupancy(mdp, RandomizedPolicy{{{0.5, 0.5}, {0.5, 0.5}}});
        for (double v : x.values) CHECK(std::abs(v - 1.0 / (4.0 * (1.0 - g))) < 1e-12);
    }
    SUBCASE("unvisited states fall back to uniform") {
        OccupancyMeasure x{2, 3, {0.2, 0.0, 0.6, 0.0, 0.0, 0.0}};
        const auto p = occupancy_to_policy(x);
        CHECK(std::abs(p.probabilities[0][0] - 0.25) < 1e-15);
        CHECK(std::abs(p.probabilities[0][2] - 0.75) < 1e-15);
        for (double v : p.probabilities[1]) CHECK(std::abs(v - 1.0 / 3.0) < 1e-15);
    }
    SUBCASE("occupancy value matches policy evaluation") {
        Rng rng(67);
        for (int trial = 0; trial < 10; ++trial) {
            const auto mdp = random_vector_instance(rng, shape(4, 3), 2);
            const auto pi = random_randomized_policy(mdp, rng);
            const auto v = occupancy_value(mdp, policy_to_occupancy(mdp, pi));
            for (std::size_t i = 0; i < 2; ++i)
                CHECK(std::abs(v[i] - mu_dot(mdp, exact_value(mdp, pi.probabilities, coordinate(mdp, i)))) < 1e-9);
        }
    }
}

TEST_CASE("dominance is consistent with the Chebyshev gap") {
    Rng rng(71);
    for (int trial = 0; trial < 20; ++trial) {
        const auto mdp = random_vector_instance(rng, shape(3, 3), 2);
        const auto all = brute_force_vectors(mdp);
        const auto ideal = ideal_point(mdp).point;
        for (const auto& a : all)
            for (const auto& b : all)
                if (pareto_dominates(a, b)) CHECK(chebyshev_gap(ideal, a) <= chebyshev_gap(ideal, b) + 1e-12);
    }
}
