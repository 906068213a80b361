#pragma once

// Builders and brute-force oracles for the unit tests. Nothing here calls
// into the library's solvers.

#include "pbmo/acceptance.hpp"
#include "pbmo/elicitation.hpp"
#include "pbmo/error.hpp"
#include "pbmo/evaluation.hpp"
#include "pbmo/lp.hpp"
#include "pbmo/momdp.hpp"
#include "pbmo/pbmdp.hpp"
#include "pbmo/random_instances.hpp"
#include "pbmo/regret.hpp"
#include "pbmo/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace testing {

using pbmo::Vector;

// Transition table where every (s, a) moves to `next[s][a]` with certainty.
inline std::vector<std::vector<Vector>> deterministic_transitions(
    const std::vector<std::vector<std::size_t>>& next, std::size_t states) {
    std::vector<std::vector<Vector>> t(next.size());
    for (std::size_t s = 0; s < next.size(); ++s)
        for (std::size_t n : next[s]) {
            Vector row(states, 0.0);
            row[n] = 1.0;
            t[s].push_back(row);
        }
    return t;
}

inline Vector uniform(std::size_t n) { return Vector(n, 1.0 / static_cast<double>(n)); }

inline pbmo::MdpInstance single_state_scalar(const Vector& rewards, double gamma) {
    std::vector<std::vector<Vector>> t(1, std::vector<Vector>(rewards.size(), Vector{1.0}));
    return pbmo::MdpInstance(1, rewards.size(), t, gamma, pbmo::ScalarReward{{rewards}}, {1.0});
}

inline pbmo::MdpInstance single_state_vector(const std::vector<Vector>& rewards, double gamma) {
    std::vector<std::vector<Vector>> t(1, std::vector<Vector>(rewards.size(), Vector{1.0}));
    return pbmo::MdpInstance(1, rewards.size(), t, gamma,
                             pbmo::VectorReward{rewards.front().size(), {rewards}}, {1.0});
}

// Dense Gaussian elimination with partial pivoting.
inline Vector gauss_solve(std::vector<Vector> a, Vector b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
        std::swap(a[c], a[p]);
        std::swap(b[c], b[p]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    for (std::size_t i = 0; i < n; ++i) b[i] /= a[i][i];
    return b;
}

// Exact value of a stationary policy: (I - gamma P) v = r.
inline Vector exact_value(const pbmo::MdpInstance& mdp, const std::vector<Vector>& probs,
                          const std::vector<Vector>& reward) {
    const std::size_t n = mdp.state_count();
    std::vector<Vector> a(n, Vector(n, 0.0));
    Vector b(n, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
        a[s][s] += 1.0;
        for (std::size_t act = 0; act < mdp.action_count(); ++act) {
            const double p = probs[s][act];
            b[s] += p * reward[s][act];
            for (std::size_t t = 0; t < n; ++t) a[s][t] -= mdp.discount() * p * mdp.transition(s, act, t);
        }
    }
    return gauss_solve(a, b);
}

inline std::vector<Vector> deterministic_probs(const pbmo::MdpInstance& mdp, const std::vector<std::size_t>& actions) {
    std::vector<Vector> p(mdp.state_count(), Vector(mdp.action_count(), 0.0));
    for (std::size_t s = 0; s < actions.size(); ++s) p[s][actions[s]] = 1.0;
    return p;
}

// Coordinate i of a vector reward as a scalar table.
inline std::vector<Vector> coordinate(const pbmo::MdpInstance& mdp, std::size_t i) {
    const auto& r = mdp.vector_reward().values;
    std::vector<Vector> out(r.size());
    for (std::size_t s = 0; s < r.size(); ++s)
        for (const auto& v : r[s]) out[s].push_back(v[i]);
    return out;
}

// All |A|^|S| action tuples, built by counting in base |A|.
inline std::vector<std::vector<std::size_t>> all_action_tuples(std::size_t states, std::size_t actions) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> t(states, 0);
    while (true) {
        out.push_back(t);
        std::size_t k = states;
        while (k > 0) {
            --k;
            if (++t[k] < actions) break;
            t[k] = 0;
            if (k == 0) return out;
        }
        if (states == 0) return out;
    }
}

inline double mu_dot(const pbmo::MdpInstance& mdp, const Vector& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += mdp.initial_distribution()[i] * v[i];
    return s;
}

// mu-aggregated value vectors of every deterministic policy, by linear solves.
inline std::vector<Vector> brute_force_vectors(const pbmo::MdpInstance& mdp) {
    const std::size_t d = mdp.vector_reward().dimension;
    std::vector<Vector> out;
    for (const auto& t : all_action_tuples(mdp.state_count(), mdp.action_count())) {
        Vector v(d);
        for (std::size_t i = 0; i < d; ++i) v[i] = mu_dot(mdp, exact_value(mdp, deterministic_probs(mdp, t), coordinate(mdp, i)));
        out.push_back(v);
    }
    return out;
}

inline bool weakly_geq(const Vector& u, const Vector& v) {
    for (std::size_t i = 0; i < u.size(); ++i)
        if (u[i] < v[i]) return false;
    return true;
}

// Plain O(n^2) non-domination filter.
inline std::vector<std::size_t> quadratic_filter(const std::vector<Vector>& pts) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < pts.size() && !dominated; ++j)
            dominated = j != i && weakly_geq(pts[j], pts[i]) && pts[j] != pts[i];
        if (!dominated) keep.push_back(i);
    }
    return keep;
}

inline double max_abs_diff(const Vector& a, const Vector& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace testing
