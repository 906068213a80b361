#include "pbmo/regret.hpp"

#include "pbmo/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pbmo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

MdpInstance objective_projection(const MdpInstance& momdp, std::size_t objective) {
    const auto& reward = momdp.vector_reward();
    ScalarReward scalar;
    scalar.values.assign(momdp.state_count(), Vector(momdp.action_count()));
    for (std::size_t s = 0; s < momdp.state_count(); ++s)
        for (std::size_t a = 0; a < momdp.action_count(); ++a)
            scalar.values[s][a] = reward.values[s][a][objective];
    return momdp.with_reward(std::move(scalar));
}

} // namespace

IdealPoint ideal_point(const MdpInstance& momdp, double tol) {
    const auto& reward = momdp.vector_reward();
    IdealPoint ideal;
    for (std::size_t i = 0; i < reward.dimension; ++i) {
        const MdpInstance projected = objective_projection(momdp, i);
        const auto vi = value_iteration(projected, tol);
        ideal.point.push_back(aggregate(momdp, vi.values));
        ideal.maximizers.push_back(vi.policy);
    }
    return ideal;
}

OccupancyMeasure policy_to_occupancy(const MdpInstance& mdp, const Policy& policy) {
    const std::size_t S = mdp.state_count();
    const std::size_t A = mdp.action_count();
    OccupancyMeasure x{S, A, Vector(S * A, 0.0)};

    auto accumulate = [&](const std::vector<Vector>& probs, double weight) {
        Matrix system = Matrix::identity(S); // (I - gamma P_pi^T)
        for (std::size_t s = 0; s < S; ++s)
            for (std::size_t a = 0; a < A; ++a) {
                if (probs[s][a] == 0.0) continue;
                for (std::size_t t = 0; t < S; ++t)
                    system(t, s) -= mdp.discount() * probs[s][a] * mdp.transition(s, a, t);
            }
        const auto d = solve(system, mdp.initial_distribution());
        if (!d) throw NumericalError("occupancy equations are singular");
        for (std::size_t s = 0; s < S; ++s)
            for (std::size_t a = 0; a < A; ++a) x.values[s * A + a] += weight * (*d)[s] * probs[s][a];
    };

    validate_policy(mdp, policy);
    if (auto* m = std::get_if<MixedPolicy>(&policy)) {
        for (std::size_t c = 0; c < m->components.size(); ++c)
            accumulate(to_randomized(mdp, m->components[c]).probabilities, m->weights[c]);
    } else {
        accumulate(action_probabilities(mdp, policy), 1.0);
    }
    return x;
}

RandomizedPolicy occupancy_to_policy(const OccupancyMeasure& x) {
    RandomizedPolicy policy;
    policy.probabilities.assign(x.states, Vector(x.actions, 0.0));
    for (std::size_t s = 0; s < x.states; ++s) {
        double total = 0.0;
        for (std::size_t a = 0; a < x.actions; ++a) total += std::max(x.at(s, a), 0.0);
        for (std::size_t a = 0; a < x.actions; ++a)
            policy.probabilities[s][a] =
                total > 0.0 ? std::max(x.at(s, a), 0.0) / total : 1.0 / static_cast<double>(x.actions);
    }
    return policy;
}

double flow_residual(const MdpInstance& mdp, const OccupancyMeasure& x) {
    const std::size_t S = mdp.state_count();
    Vector balance(mdp.initial_distribution());
    for (std::size_t s = 0; s < S; ++s)
        for (std::size_t a = 0; a < mdp.action_count(); ++a) {
            balance[s] -= x.at(s, a);
            for (std::size_t t = 0; t < S; ++t) balance[t] += mdp.discount() * mdp.transition(s, a, t) * x.at(s, a);
        }
    return inf_norm(balance);
}

Vector occupancy_value(const MdpInstance& momdp, const OccupancyMeasure& x) {
    const auto& reward = momdp.vector_reward();
    Vector value(reward.dimension, 0.0);
    for (std::size_t s = 0; s < x.states; ++s)
        for (std::size_t a = 0; a < x.actions; ++a)
            for (std::size_t i = 0; i < reward.dimension; ++i) value[i] += x.at(s, a) * reward.values[s][a][i];
    return value;
}

double chebyshev_gap(std::span<const double> ideal, std::span<const double> value) {
    double worst = -kInf;
    for (std::size_t i = 0; i < ideal.size(); ++i) worst = std::max(worst, ideal[i] - value[i]);
    return worst;
}

double simplex_regret(std::span<const double> ideal, std::span<const double> value) {
    // the origin contributes 0, canonical vector e_i contributes ideal_i - value_i
    return std::max(0.0, chebyshev_gap(ideal, value));
}

ChebyshevSolution chebyshev_optimal(const MdpInstance& momdp, double tol) {
    const auto& reward = momdp.vector_reward();
    const std::size_t S = momdp.state_count();
    const std::size_t A = momdp.action_count();
    const std::size_t d = reward.dimension;

    ChebyshevSolution out;
    out.ideal = ideal_point(momdp, tol);

    // variables: x(s, a) >= 0 row-major, then z free
    LinearProgram lp(S * A, ObjectiveSense::Minimize);
    const std::size_t z = lp.add_variable(1.0, -kInf);
    for (std::size_t next = 0; next < S; ++next) {
        Vector row(S * A + 1, 0.0);
        for (std::size_t a = 0; a < A; ++a) row[next * A + a] += 1.0;
        for (std::size_t s = 0; s < S; ++s)
            for (std::size_t a = 0; a < A; ++a) row[s * A + a] -= momdp.discount() * momdp.transition(s, a, next);
        lp.add_row(std::move(row), RowSense::Equal, momdp.initial_distribution()[next]);
    }
    for (std::size_t i = 0; i < d; ++i) {
        Vector row(S * A + 1, 0.0);
        for (std::size_t s = 0; s < S; ++s)
            for (std::size_t a = 0; a < A; ++a) row[s * A + a] = reward.values[s][a][i];
        row[z] = 1.0;
        lp.add_row(std::move(row), RowSense::GreaterEqual, out.ideal.point[i]);
    }

    const auto sol = solve_lp(lp);
    if (sol.status != LpStatus::Optimal)
        throw NumericalError("Chebyshev LP ended with status " + to_string(sol.status));

    out.occupancy = OccupancyMeasure{S, A, Vector(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(S * A))};
    for (double& v : out.occupancy.values) v = std::max(v, 0.0);
    out.policy = occupancy_to_policy(out.occupancy);
    out.value = occupancy_value(momdp, out.occupancy);
    // The ideal point is the exact per-objective maximum, so z* >= 0 up to
    // value-iteration error.
    out.regret = std::max(sol.x[z], 0.0);
    for (std::size_t i = 0; i < d; ++i)
        if (out.ideal.point[i] - out.value[i] >= out.regret - 1e-8) out.active.push_back(i);
    return out;
}

MinimaxRegretResult minimax_regret(const MdpInstance& momdp, double tol, std::size_t cap, bool with_hypercube) {
    MinimaxRegretResult result;
    result.solution = chebyshev_optimal(momdp, tol);
    const Vector value = aggregate(momdp, vector_evaluate(momdp, result.solution.policy, tol).values);
    result.value = simplex_regret(result.solution.ideal.point, value);

    if (with_hypercube) {
        try {
            const auto policies = enumerate_deterministic_policies(momdp, cap);
            // w -> max_pi' w.(V(pi') - V(pi)) is maximised over [0,1]^d by keeping
            // the positive gaps; pi' -> sum of positive gaps is convex in the
            // occupancy measure, so deterministic best responses suffice.
            double best = 0.0;
            for (const Vector& other : enumerate_policy_values(momdp, policies, tol)) {
                double gain = 0.0;
                for (std::size_t i = 0; i < value.size(); ++i) gain += std::max(0.0, other[i] - value[i]);
                best = std::max(best, gain);
            }
            result.hypercube_value = best;
        } catch (const CapExceededError&) {
            result.hypercube_value.reset();
        }
    }
    return result;
}

Lemma3Report verify_lemma3(const MdpInstance& momdp, double tol, std::size_t cap, std::uint64_t seed) {
    const auto policies = enumerate_deterministic_policies(momdp, cap);
    const std::size_t d = momdp.vector_reward().dimension;
    const double eval_tol = 1e-11;

    std::vector<Vector> values = enumerate_policy_values(momdp, policies, eval_tol);
    const auto cheb = chebyshev_optimal(momdp, eval_tol);
    values.push_back(aggregate(momdp, vector_evaluate(momdp, cheb.policy, eval_tol).values));
    const std::size_t lp_index = values.size() - 1;

    // best responses for the regret side come from enumeration
    Vector best(d, -kInf);
    for (std::size_t k = 0; k < policies.size(); ++k)
        for (std::size_t i = 0; i < d; ++i) best[i] = std::max(best[i], values[k][i]);

    Rng rng(seed);
    std::vector<double> cheb_value(values.size()), regret_value(values.size());
    Lemma3Report report;
    report.policies = policies.size();
    report.lp_regret = cheb.regret;
    bool interior_ok = true;
    for (std::size_t k = 0; k < values.size(); ++k) {
        cheb_value[k] = chebyshev_gap(cheb.ideal.point, values[k]);
        regret_value[k] = simplex_regret(best, values[k]);
        report.value_gap = std::max(report.value_gap, std::abs(cheb_value[k] - regret_value[k]));

        // interior weights never beat the vertex maximum
        for (int n = 0; n < 8; ++n) {
            Vector w(d);
            double total = 0.0;
            for (auto& x : w) total += (x = rng.uniform());
            const double scale = rng.uniform() / total;
            for (auto& x : w) x *= scale;
            double best_response = -kInf;
            for (std::size_t j = 0; j < policies.size(); ++j) best_response = std::max(best_response, dot(w, values[j]));
            if (best_response - dot(w, values[k]) > regret_value[k] + tol) interior_ok = false;
        }
    }

    double cheb_det_min = kInf, regret_det_min = kInf;
    for (std::size_t k = 0; k < policies.size(); ++k) {
        cheb_det_min = std::min(cheb_det_min, cheb_value[k]);
        regret_det_min = std::min(regret_det_min, regret_value[k]);
    }
    for (std::size_t k = 0; k < policies.size(); ++k) {
        if (cheb_value[k] <= cheb_det_min + tol) report.chebyshev_argmin.push_back(k);
        if (regret_value[k] <= regret_det_min + tol) report.regret_argmin.push_back(k);
    }
    report.chebyshev_min = std::min(cheb_det_min, cheb_value[lp_index]);
    report.regret_min = std::min(regret_det_min, regret_value[lp_index]);
    report.lp_excess = std::max(0.0, cheb_value[lp_index] - cheb_det_min);

    report.passed = interior_ok && report.chebyshev_argmin == report.regret_argmin &&
                    std::abs(report.chebyshev_min - report.regret_min) <= tol &&
                    report.value_gap <= tol && cheb_value[lp_index] <= cheb_det_min + tol &&
                    std::abs(cheb_value[lp_index] - cheb.regret) <= tol;
    return report;
}

} // namespace pbmo
