#include "pbmo/acceptance.hpp"

#include "pbmo/error.hpp"
#include "pbmo/random_instances.hpp"
#include "pbmo/regret.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>

namespace pbmo {

namespace fixtures {

MdpInstance intransitive_dice() {
    constexpr std::size_t S = 11, A = 3, absorbing = 10;
    const std::size_t faces[A][3] = {{2, 4, 9}, {1, 6, 8}, {3, 5, 7}};
    std::vector<std::vector<Vector>> t(S, std::vector<Vector>(A, Vector(S, 0.0)));
    ScalarReward r{std::vector<Vector>(S, Vector(A, 0.0))};
    for (std::size_t a = 0; a < A; ++a)
        for (std::size_t f : faces[a]) t[0][a][f] = 1.0 / 3.0;
    for (std::size_t s = 1; s < S; ++s)
        for (std::size_t a = 0; a < A; ++a) {
            t[s][a][absorbing] = 1.0;
            if (s != absorbing) r.values[s][a] = static_cast<double>(s);
        }
    // exact thirds do not sum to 1 in binary; the last face absorbs the error
    for (std::size_t a = 0; a < A; ++a) t[0][a][faces[a][2]] = 1.0 - 2.0 * (1.0 / 3.0);
    return MdpInstance(S, A, std::move(t), 0.5, std::move(r), Vector(S, 1.0 / static_cast<double>(S)));
}

std::vector<Policy> dice_policies() {
    std::vector<Policy> out;
    for (std::size_t die = 0; die < 3; ++die) {
        DeterministicPolicy p{std::vector<std::size_t>(11, 0)};
        p.actions[0] = die;
        out.emplace_back(std::move(p));
    }
    return out;
}

MdpInstance level_divergence() {
    std::vector<std::vector<Vector>> t{{{1.0, 0.0}}, {{0.0, 1.0}}};
    VectorReward r{2, {{{1.0, 0.0}}, {{0.0, 1.0}}}};
    return MdpInstance(2, 1, std::move(t), 0.0, std::move(r), {0.5, 0.5});
}

MdpInstance two_label_choice() {
    std::vector<std::vector<Vector>> t{{{1.0}, {1.0}}};
    SymbolicReward r{2, {{0, 1}}};
    return MdpInstance(1, 2, std::move(t), 0.5, std::move(r), {1.0});
}

MdpInstance single_state() {
    std::vector<std::vector<Vector>> t{{{1.0}}};
    ScalarReward r{{{1.0}}};
    return MdpInstance(1, 1, std::move(t), 0.5, std::move(r), {1.0});
}

} // namespace fixtures

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

// Values for labels in original numbering from increasing canonical values.
Vector to_original_labels(const RewardOrder& order, const Vector& canonical) {
    Vector x(canonical.size());
    for (std::size_t k = 0; k < canonical.size(); ++k) x[order.ascending[k]] = canonical[k];
    return x;
}

Vector exact_values(const MdpInstance& mdp, const DeterministicPolicy& p) {
    const std::size_t S = mdp.state_count();
    Matrix m = Matrix::identity(S);
    Vector r(S);
    for (std::size_t s = 0; s < S; ++s) {
        r[s] = mdp.scalar_reward().values[s][p.actions[s]];
        for (std::size_t t = 0; t < S; ++t) m(s, t) -= mdp.discount() * mdp.transition(s, p.actions[s], t);
    }
    return *solve(m, r);
}

std::set<std::size_t> argmax_set(const Vector& v, double tol) {
    const double best = *std::max_element(v.begin(), v.end());
    std::set<std::size_t> out;
    for (std::size_t k = 0; k < v.size(); ++k)
        if (v[k] >= best - tol) out.insert(k);
    return out;
}

// ---------------------------------------------------------------------------

CriterionResult ordered_reward_identity(Rng& rng, std::size_t trials) {
    CriterionResult out{1, "ordered-reward value identity", false, {}, {}, 0.0, 10.0};
    const InstanceShape shape{1, 10, 1, 4, 0.5, 0.95, 3};
    double worst = 0.0;
    for (std::size_t n = 0; n < trials; ++n) {
        MdpInstance base = random_dynamics(rng, shape);
        const std::size_t d = rng.between(1, std::min<std::size_t>(5, base.state_count() * base.action_count()));
        InstanceShape fixed{base.state_count(), base.state_count(), base.action_count(), base.action_count(),
                            base.discount(), base.discount(), 3};
        const MdpInstance pbmdp = random_symbolic_instance(rng, fixed, d);
        const RewardOrder order = random_order(d, rng);
        const Vector x = sample_increasing_values(d, rng, -10.0, 10.0);
        const auto report = verify_lemma1(pbmdp, order, x, random_deterministic_policy(pbmdp, rng), 1e-11);
        worst = std::max(worst, report.max_residual());
    }
    out.passed = worst <= 1e-8;
    out.summary = "max residual " + fmt(worst) + " over " + std::to_string(trials) + " instances (bound 1e-8)";
    out.metrics = {{"instances", trials}, {"max_residual", worst}, {"bound", 1e-8}};
    return out;
}

CriterionResult ordered_history_identity(Rng& rng, std::size_t trials) {
    CriterionResult out{2, "ordered-history value identity", false, {}, {}, 0.0, 20.0};
    const InstanceShape shape{1, 10, 1, 4, 0.5, 0.95, 3};
    double worst = 0.0, worst_condition = 0.0;
    std::size_t done = 0, draws = 0;
    while (done < trials && draws < 20 * trials) {
        ++draws;
        MdpInstance base = random_dynamics(rng, shape);
        const std::size_t d = rng.between(1, std::min<std::size_t>(5, base.state_count() * base.action_count()));
        InstanceShape fixed{base.state_count(), base.state_count(), base.action_count(), base.action_count(),
                            base.discount(), base.discount(), 3};
        const MdpInstance pbmdp = random_symbolic_instance(rng, fixed, d);
        const auto fixture = random_history_fixture(pbmdp, rng, 1e6);
        if (!fixture) continue;
        const auto report = verify_lemma2(pbmdp, fixture->ordered, fixture->values,
                                          random_deterministic_policy(pbmdp, rng), 1e-11, 1e6);
        worst = std::max(worst, report.max_residual());
        worst_condition = std::max(worst_condition, fixture->basis.condition);
        ++done;
    }

    // singular bases must be rejected
    std::size_t singular = 0, rejected = 0;
    auto expect_independence_error = [&](const MdpInstance& pbmdp, const OrderedHistories& ordered) {
        ++singular;
        try {
            history_basis_matrix(pbmdp, ordered);
        } catch (const IndependenceError&) {
            ++rejected;
        }
    };
    const MdpInstance choice = fixtures::two_label_choice();
    expect_independence_error(choice, {{History{{0, 0}, {0}}, History{{0, 0, 0}, {0, 0}}}});
    expect_independence_error(choice, {{History{{0, 0}, {1}}, History{{0, 0}, {1}}}});
    for (int n = 0; n < 10; ++n) {
        const MdpInstance pbmdp = random_symbolic_instance(rng, {2, 6, 2, 3, 0.5, 0.95, 3}, 3);
        auto fixture = random_history_fixture(pbmdp, rng, 1e6);
        if (!fixture) continue;
        fixture->ordered.histories[2] = fixture->ordered.histories[0];
        expect_independence_error(pbmdp, fixture->ordered);
    }

    out.passed = done == trials && worst <= 1e-6 && rejected == singular;
    out.summary = "max residual " + fmt(worst) + " over " + std::to_string(done) +
                  " instances (bound 1e-6); singular fixtures rejected " + std::to_string(rejected) + "/" +
                  std::to_string(singular);
    out.metrics = {{"instances", done},          {"draws", draws},
                   {"max_residual", worst},      {"bound", 1e-6},
                   {"max_condition", worst_condition}, {"singular_fixtures", singular},
                   {"singular_rejected", rejected}};
    return out;
}

CriterionResult chebyshev_regret(Rng& rng, std::size_t trials) {
    CriterionResult out{3, "Chebyshev optimum equals minimax regret", false, {}, {}, 0.0, 60.0};
    const InstanceShape shape{2, 5, 2, 3, 0.5, 0.9, 3};
    double worst_gap = 0.0, worst_excess = 0.0;
    std::size_t policies = 0;
    for (std::size_t n = 0; n < trials; ++n) {
        MdpInstance base = random_dynamics(rng, shape);
        const std::size_t d = rng.between(2, std::min<std::size_t>(4, base.state_count() * base.action_count()));
        InstanceShape fixed{base.state_count(), base.state_count(), base.action_count(), base.action_count(),
                            base.discount(), base.discount(), 3};
        const MdpInstance pbmdp = random_symbolic_instance(rng, fixed, d);
        const MdpInstance momdp = ordered_reward_transform(pbmdp, random_order(d, rng));

        const auto result = minimax_regret(momdp, 1e-11, kDefaultPolicyCap, false);
        worst_gap = std::max(worst_gap, std::abs(result.solution.regret - result.value));
        const auto enumerated = enumerate_deterministic_policies(momdp);
        policies += enumerated.size();
        double best = std::numeric_limits<double>::infinity();
        for (const Vector& v : enumerate_policy_values(momdp, enumerated, 1e-11))
            best = std::min(best, chebyshev_gap(result.solution.ideal.point, v));
        const Vector lp_value =
            aggregate(momdp, vector_evaluate(momdp, result.solution.policy, 1e-11).values);
        worst_excess = std::max(worst_excess, chebyshev_gap(result.solution.ideal.point, lp_value) - best);
    }
    out.passed = worst_gap <= 1e-8 && worst_excess <= 1e-8;
    out.summary = "max |z* - regret| " + fmt(worst_gap) + ", max LP excess over best deterministic " +
                  fmt(worst_excess) + " over " + std::to_string(trials) + " instances (bound 1e-8)";
    out.metrics = {{"instances", trials},
                   {"enumerated_policies", policies},
                   {"max_regret_gap", worst_gap},
                   {"max_lp_excess", worst_excess},
                   {"bound", 1e-8}};
    return out;
}

CriterionResult cover_validity(Rng& rng) {
    CriterionResult out{4, "epsilon-cover validity and monotonicity", false, {}, {}, 0.0, 0.0};
    const double eps[] = {0.01, 0.1, 0.5};
    std::size_t valid = 0, monotone = 0, largest = 0;
    for (int n = 0; n < 50; ++n) {
        const std::size_t count = rng.between(1, 500);
        const std::size_t d = rng.between(1, 4);
        const bool curved = n % 2 == 1;
        std::vector<Vector> points(count, Vector(d));
        for (auto& p : points) {
            double norm = 0.0;
            for (double& x : p) {
                x = rng.uniform();
                norm += x * x;
            }
            if (curved && norm > 0.0)
                for (double& x : p) x *= rng.uniform(0.9, 1.0) / std::sqrt(norm);
        }
        std::size_t previous = std::numeric_limits<std::size_t>::max();
        bool cloud_monotone = true;
        for (double e : eps) {
            const auto idx = epsilon_cover(points, e);
            std::vector<Vector> cover;
            for (std::size_t k : idx) cover.push_back(points[k]);
            valid += verify_cover(cover, points, e) ? 1 : 0;
            if (idx.size() > previous) cloud_monotone = false;
            previous = idx.size();
            largest = std::max(largest, idx.size());
        }
        monotone += cloud_monotone ? 1 : 0;
    }
    out.passed = valid == 150 && monotone == 50;
    out.summary = "valid covers " + std::to_string(valid) + "/150, monotone clouds " + std::to_string(monotone) +
                  "/50";
    out.metrics = {{"clouds", 50}, {"valid_covers", valid}, {"monotone_clouds", monotone}, {"largest_cover", largest}};
    return out;
}

CriterionResult dice_dominance() {
    CriterionResult out{5, "intransitive dice", false, {}, {}, 0.0, 0.0};
    const MdpInstance dice = fixtures::intransitive_dice();
    const auto policies = fixtures::dice_policies();
    TournamentOptions options;
    options.duel.horizon = fixtures::kDiceHorizon;
    options.duel.start = fixtures::kDiceStart;
    const Tournament t = build_tournament(dice, policies, utility_preference(dice), options);

    double worst = 0.0;
    Json duels = Json::array();
    for (std::size_t i = 0; i < 3; ++i) {
        const DuelResult& d = t.at(i, (i + 1) % 3);
        worst = std::max(worst, std::abs(d.p - 5.0 / 9.0));
        duels.push_back({{"first", i}, {"second", (i + 1) % 3}, {"p", d.p}, {"q", d.q}});
    }
    const auto cycles = detect_cycles(t);
    const MixedStrategy mixed = optimal_mixed_policy(t);
    double mixed_error = 0.0;
    for (double w : mixed.weights) mixed_error = std::max(mixed_error, std::abs(w - 1.0 / 3.0));

    out.passed = worst <= 1e-12 && cycles.size() == 1 && mixed_error <= 1e-6;
    out.summary = "max |p - 5/9| " + fmt(worst) + ", cycles " + std::to_string(cycles.size()) +
                  ", max |w - 1/3| " + fmt(mixed_error);
    out.metrics = {{"duels", duels},
                   {"max_p_error", worst},
                   {"cycles", cycles.size()},
                   {"mixed_weights", mixed.weights},
                   {"mixed_error", mixed_error}};
    return out;
}

CriterionResult scalarization_levels(Rng& rng) {
    CriterionResult out{6, "scalarization levels", false, {}, {}, 0.0, 0.0};
    const InstanceShape shape{2, 3, 2, 2, 0.05, 0.1, 2};
    double worst = 0.0;
    std::size_t same_argmax = 0;
    ScalarizeOptions options;
    options.truncation = 1e-12;
    options.tol = 1e-13;
    for (int n = 0; n < 50; ++n) {
        const MdpInstance momdp = random_vector_instance(rng, shape, 2);
        const ScalarizingFunction f = ScalarizingFunction::linear({rng.uniform(), rng.uniform()});
        const auto policies = enumerate_deterministic_policies(momdp);
        std::array<Vector, 3> level_values;
        const ScalarizationLevel levels[] = {ScalarizationLevel::Reward, ScalarizationLevel::History,
                                             ScalarizationLevel::Value};
        for (std::size_t l = 0; l < 3; ++l) {
            options.level = levels[l];
            for (const auto& p : policies) level_values[l].push_back(scalarize(momdp, f, p, options));
        }
        for (std::size_t k = 0; k < policies.size(); ++k)
            for (std::size_t l = 1; l < 3; ++l)
                worst = std::max(worst, std::abs(level_values[l][k] - level_values[0][k]));
        const auto reference = argmax_set(level_values[0], 1e-9);
        if (argmax_set(level_values[1], 1e-9) == reference && argmax_set(level_values[2], 1e-9) == reference)
            ++same_argmax;
    }

    const MdpInstance fixture = fixtures::level_divergence();
    const auto f = ScalarizingFunction::user("max-component", 2, [](std::span<const double> v) {
        return *std::max_element(v.begin(), v.end());
    });
    const Policy only = DeterministicPolicy{{0, 0}};
    options.level = ScalarizationLevel::History;
    const double history = scalarize(fixture, f, only, options);
    options.level = ScalarizationLevel::Value;
    const double value = scalarize(fixture, f, only, options);
    options.level = ScalarizationLevel::Reward;
    const double reward = scalarize(fixture, f, only, options);

    out.passed = worst <= 1e-9 && same_argmax == 50 && std::abs(history - value) >= 0.1;
    out.summary = "linear max level gap " + fmt(worst) + ", identical argmax " + std::to_string(same_argmax) +
                  "/50; max-component fixture history " + fmt(history) + " vs value " + fmt(value);
    out.metrics = {{"instances", 50},
                   {"max_level_gap", worst},
                   {"identical_argmax", same_argmax},
                   {"divergence", {{"history", history}, {"value", value}, {"reward", reward}}}};
    return out;
}

CriterionResult dominance_soundness(Rng& rng) {
    CriterionResult out{7, "dominance soundness", false, {}, {}, 0.0, 0.0};
    const InstanceShape shape{1, 4, 1, 3, 0.5, 0.95, 3};
    std::size_t passed = 0, triples = 0, checks = 0;
    for (int n = 0; n < 100; ++n) {
        MdpInstance base = random_dynamics(rng, shape);
        const std::size_t d = rng.between(1, std::min<std::size_t>(4, base.state_count() * base.action_count()));
        InstanceShape fixed{base.state_count(), base.state_count(), base.action_count(), base.action_count(),
                            base.discount(), base.discount(), 3};
        const MdpInstance pbmdp = random_symbolic_instance(rng, fixed, d);
        const RewardOrder order = random_order(d, rng);
        const MdpInstance transformed = ordered_reward_transform(pbmdp, order);
        std::vector<Vector> xs;
        for (int k = 0; k < 100; ++k) xs.push_back(to_original_labels(order, sample_increasing_values(d, rng, -10.0, 10.0)));
        const auto report = dominance_soundness_check(pbmdp, transformed, xs);
        passed += report.passed ? 1 : 0;
        triples += report.dominant_pairs;
        checks += report.checks;
    }

    const MdpInstance choice = fixtures::two_label_choice();
    const RewardOrder increasing{{0, 1}};
    const auto counter = dominance_soundness_check(choice, ordered_reward_transform(choice, increasing), {{2.0, 1.0}});

    out.passed = passed == 100 && !counter.passed;
    out.summary = "sound on " + std::to_string(passed) + "/100 instances (" + std::to_string(checks) +
                  " comparisons); decreasing-x fixture " + (counter.passed ? "passed (unexpected)" : "fails");
    out.metrics = {{"instances", 100},
                   {"sound_instances", passed},
                   {"dominant_triples", triples},
                   {"comparisons", checks},
                   {"counterexample_detected", !counter.passed}};
    return out;
}

// max/min c.x over lo <= x <= hi and the rows, by trying every vertex.
LpSolution vertex_oracle(const LinearProgram& lp) {
    const std::size_t n = lp.variable_count();
    std::vector<Vector> g;
    Vector h;
    for (const auto& row : lp.rows) {
        if (row.sense != RowSense::GreaterEqual) {
            g.push_back(row.coefficients);
            h.push_back(row.rhs);
        }
        if (row.sense != RowSense::LessEqual) {
            Vector neg(row.coefficients);
            for (double& x : neg) x = -x;
            g.push_back(std::move(neg));
            h.push_back(-row.rhs);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        Vector e(n, 0.0);
        if (std::isfinite(lp.lower[i])) {
            e[i] = -1.0;
            g.push_back(e);
            h.push_back(-lp.lower[i]);
        }
        if (std::isfinite(lp.upper[i])) {
            e[i] = 1.0;
            g.push_back(e);
            h.push_back(lp.upper[i]);
        }
    }
    LpSolution best;
    best.status = LpStatus::Infeasible;
    const double sign = lp.sense == ObjectiveSense::Maximize ? 1.0 : -1.0;
    std::vector<std::size_t> pick(n);
    std::function<void(std::size_t, std::size_t)> choose = [&](std::size_t depth, std::size_t from) {
        if (depth == n) {
            Matrix m(n, n);
            Vector rhs(n);
            for (std::size_t r = 0; r < n; ++r) {
                for (std::size_t c = 0; c < n; ++c) m(r, c) = g[pick[r]][c];
                rhs[r] = h[pick[r]];
            }
            const auto x = solve(m, rhs);
            if (!x) return;
            for (std::size_t k = 0; k < g.size(); ++k)
                if (dot(g[k], *x) > h[k] + 1e-9 * (1.0 + std::abs(h[k]))) return;
            const double value = dot(lp.objective, *x);
            if (best.status != LpStatus::Optimal || sign * value > sign * best.objective) {
                best.status = LpStatus::Optimal;
                best.x = *x;
                best.objective = value;
            }
            return;
        }
        for (std::size_t k = from; k < g.size(); ++k) {
            pick[depth] = k;
            choose(depth + 1, k + 1);
        }
    };
    choose(0, 0);
    return best;
}

LinearProgram random_lp(Rng& rng) {
    const std::size_t n = rng.between(1, 4);
    const std::size_t m = rng.between(1, 4);
    LinearProgram lp(0, rng.uniform() < 0.5 ? ObjectiveSense::Maximize : ObjectiveSense::Minimize);
    Vector interior;
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = rng.uniform() < 0.3 ? -1.5 : 0.0;
        const double hi = rng.uniform(2.0, 6.0);
        lp.add_variable(rng.uniform(-1.0, 1.0), lo, hi);
        interior.push_back(rng.uniform(lo, hi));
    }
    const bool maybe_infeasible = rng.uniform() < 0.2;
    for (std::size_t r = 0; r < m; ++r) {
        Vector a(n);
        for (double& x : a) x = rng.uniform(-1.0, 1.0);
        const double u = rng.uniform();
        const RowSense sense = u < 0.15 ? RowSense::Equal : u < 0.6 ? RowSense::LessEqual : RowSense::GreaterEqual;
        double rhs = dot(a, interior);
        const double slack = rng.uniform(0.0, 1.0) * (maybe_infeasible ? -3.0 : 1.0);
        if (sense == RowSense::LessEqual) rhs += slack;
        if (sense == RowSense::GreaterEqual) rhs -= slack;
        lp.add_row(std::move(a), sense, rhs);
    }
    return lp;
}

CriterionResult solver_cross_checks(Rng& rng) {
    CriterionResult out{8, "solver cross-checks", false, {}, {}, 0.0, 0.0};
    const InstanceShape shape{1, 5, 1, 3, 0.5, 0.95, 3};
    double vi_worst = 0.0;
    for (int n = 0; n < 20; ++n) {
        const MdpInstance mdp = random_scalar_instance(rng, shape);
        const auto vi = value_iteration(mdp, 1e-10);
        Vector best(mdp.state_count(), -std::numeric_limits<double>::infinity());
        for (const auto& p : enumerate_deterministic_policies(mdp)) {
            const Vector v = exact_values(mdp, p);
            for (std::size_t s = 0; s < v.size(); ++s) best[s] = std::max(best[s], v[s]);
        }
        for (std::size_t s = 0; s < best.size(); ++s) vi_worst = std::max(vi_worst, std::abs(best[s] - vi.values[s]));
    }

    double lp_worst = 0.0;
    std::size_t status_match = 0, infeasible = 0;
    for (int n = 0; n < 50; ++n) {
        const LinearProgram lp = random_lp(rng);
        const LpSolution expected = vertex_oracle(lp);
        const LpSolution actual = solve_lp(lp);
        if (expected.status == actual.status) ++status_match;
        if (expected.status == LpStatus::Infeasible) ++infeasible;
        if (expected.status == LpStatus::Optimal && actual.status == LpStatus::Optimal)
            lp_worst = std::max(lp_worst, std::abs(expected.objective - actual.objective));
    }

    out.passed = vi_worst <= 1e-8 && status_match == 50 && lp_worst <= 1e-6;
    out.summary = "value iteration max error " + fmt(vi_worst) + " on 20 instances (bound 1e-8); LP status " +
                  std::to_string(status_match) + "/50, max objective error " + fmt(lp_worst) + " (bound 1e-6)";
    out.metrics = {{"vi_instances", 20},        {"vi_max_error", vi_worst}, {"lp_instances", 50},
                   {"lp_status_match", status_match}, {"lp_infeasible", infeasible}, {"lp_max_error", lp_worst}};
    return out;
}

CriterionResult elicitation_quality(Rng& rng) {
    CriterionResult out{9, "elicitation", false, {}, {}, 0.0, 0.0};
    const InstanceShape shape{2, 4, 2, 3, 0.5, 0.9, 3};
    const double epsilon = 0.1;
    std::size_t within_budget = 0, within_bound = 0, within_cover_bound = 0, consistent = 0, queries = 0,
                max_cover = 0;
    double worst_ratio = 0.0;
    for (int n = 0; n < 20; ++n) {
        const MdpInstance momdp = random_vector_instance(rng, shape, 2);
        const Vector x_star = sample_increasing_values(2, rng, 0.0, 10.0);
        const SimulatedOracle oracle = SimulatedOracle::from_reward_values(x_star);
        const Vector& w = oracle.weights();

        bool ok = true;
        std::vector<std::size_t> previous_best;
        bool first_round = true;
        ElicitationOptions options;
        options.epsilon = epsilon;
        options.observer = [&](const WeightPolytope& polytope, const ElicitationRound& round) {
            if (!polytope.contains(w)) ok = false;
            if (!first_round && !std::includes(previous_best.begin(), previous_best.end(),
                                               round.feasibly_best.begin(), round.feasibly_best.end()))
                ok = false;
            previous_best = round.feasibly_best;
            first_round = false;
        };
        const auto result = elicit_loop(momdp, oracle, options);
        consistent += ok ? 1 : 0;
        queries += result.rounds.size();
        max_cover = std::max(max_cover, result.candidates.size());
        if (result.converged && result.rounds.size() + 1 <= result.candidates.size()) ++within_budget;

        const ScalarizingFunction f = ScalarizingFunction::linear(w);
        const double optimum = aggregate(momdp, value_iteration(scalarized_reward_instance(momdp, f), 1e-11).values);
        const double recommended = dot(w, result.candidates[result.recommended].value);
        const IdealPoint ideal = ideal_point(momdp);
        double worst_frontier = std::numeric_limits<double>::infinity();
        for (const auto& m : pareto_frontier(momdp, kDefaultPolicyCap, 1e-11).members)
            worst_frontier = std::min(worst_frontier, *std::min_element(m.value.begin(), m.value.end()));
        const double range = *std::max_element(ideal.point.begin(), ideal.point.end()) - worst_frontier;
        const double loss = optimum - recommended;
        if (loss <= epsilon * range + 1e-9) ++within_bound;
        if (range > 0.0) worst_ratio = std::max(worst_ratio, loss / range);
        // what a multiplicative cover does guarantee: (1 + eps) c >= v* gives
        // w.v* - w.c <= eps w.c for the best cover element c
        double best_cover = -std::numeric_limits<double>::infinity();
        for (const auto& c : result.candidates) best_cover = std::max(best_cover, dot(w, c.value));
        if (loss <= epsilon * best_cover + 1e-9) ++within_cover_bound;
    }
    out.passed = within_budget == 20 && within_bound == 20 && consistent == 20;
    out.summary = "query budget met " + std::to_string(within_budget) + "/20, value within bound " +
                  std::to_string(within_bound) + "/20, oracle weights feasible every round " +
                  std::to_string(consistent) + "/20 (" + std::to_string(queries) +
                  " queries; within the cover's own eps w.c bound " + std::to_string(within_cover_bound) + "/20)";
    out.metrics = {{"instances", 20},
                   {"epsilon", epsilon},
                   {"within_query_budget", within_budget},
                   {"within_value_bound", within_bound},
                   {"within_cover_guarantee", within_cover_bound},
                   {"consistent_rounds", consistent},
                   {"total_queries", queries},
                   {"largest_cover", max_cover},
                   {"max_loss_over_range", worst_ratio}};
    return out;
}

} // namespace

CriterionResult run_lemma_trials(int lemma, std::size_t trials, std::uint64_t seed) {
    if (trials == 0) throw ValidationError("--trials must be positive");
    Rng rng(seed);
    switch (lemma) {
    case 1: return ordered_reward_identity(rng, trials);
    case 2: return ordered_history_identity(rng, trials);
    case 3: return chebyshev_regret(rng, trials);
    default: throw ValidationError("--lemma must be 1, 2 or 3");
    }
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
    std::vector<CriterionResult> results;
    auto wanted = [&](int id) {
        return options.only.empty() || std::find(options.only.begin(), options.only.end(), id) != options.only.end();
    };
    // every criterion draws from its own stream so subsets reproduce the full run
    auto run = [&](int id, auto&& body) {
        if (!wanted(id)) return;
        Rng rng(options.seed * 1000003ull + static_cast<std::uint64_t>(id));
        const auto start = Clock::now();
        CriterionResult r;
        try {
            r = body(rng);
        } catch (const std::exception& e) {
            r.id = id;
            r.name = "criterion " + std::to_string(id);
            r.passed = false;
            r.summary = std::string("error: ") + e.what();
            r.metrics = {{"error", e.what()}};
        }
        r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
        if (r.time_limit > 0.0 && r.seconds > r.time_limit) r.passed = false;
        if (options.on_result) options.on_result(r);
        results.push_back(std::move(r));
    };
    run(1, [](Rng& rng) { return ordered_reward_identity(rng, 100); });
    run(2, [](Rng& rng) { return ordered_history_identity(rng, 100); });
    run(3, [](Rng& rng) { return chebyshev_regret(rng, 100); });
    run(4, cover_validity);
    run(5, [](Rng&) { return dice_dominance(); });
    run(6, scalarization_levels);
    run(7, dominance_soundness);
    run(8, solver_cross_checks);
    run(9, elicitation_quality);
    return results;
}

Json acceptance_document(const std::vector<CriterionResult>& results, std::uint64_t seed, bool wall_time) {
    Json criteria = Json::array();
    bool all = true;
    for (const auto& r : results) {
        Json c{{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"summary", r.summary}, {"metrics", r.metrics}};
        if (r.time_limit > 0.0) c["time_limit_s"] = r.time_limit;
        if (wall_time) c["seconds"] = r.seconds;
        criteria.push_back(std::move(c));
        all = all && r.passed;
    }
    return {{"criteria", criteria}, {"passed", all}, {"seed", seed}};
}

std::string format_criterion(const CriterionResult& r) {
    char time[32];
    std::snprintf(time, sizeof time, "%.2f s", r.seconds);
    std::string line = std::string(r.passed ? "PASS" : "FAIL") + "  criterion " + std::to_string(r.id) + " [" +
                       r.name + "]: " + r.summary + " (" + time;
    if (r.time_limit > 0.0) line += ", limit " + fmt(r.time_limit) + " s";
    return line + ")";
}

} // namespace pbmo
