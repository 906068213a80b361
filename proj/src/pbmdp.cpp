#include "pbmo/pbmdp.hpp"

#include "pbmo/error.hpp"
#include "pbmo/lp.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>

namespace pbmo {

namespace {

constexpr double kTieTolerance = 1e-12;

Comparison compare_values(double a, double b) {
    if (a > b) return Comparison::FirstPreferred;
    if (b > a) return Comparison::SecondPreferred;
    return Comparison::Equivalent;
}

std::size_t duel_horizon(const MdpInstance& mdp, const DuelOptions& options) {
    return options.horizon > 0 ? options.horizon : truncation_horizon(mdp.discount(), options.truncation);
}

} // namespace

std::string to_string(PreferenceProvenance p) {
    switch (p) {
    case PreferenceProvenance::UtilityBased: return "utility-based";
    case PreferenceProvenance::ParetoInduced: return "pareto-induced";
    case PreferenceProvenance::Scalarized: return "scalarized";
    case PreferenceProvenance::UserSupplied: return "user-supplied";
    }
    return "unknown";
}

HistoryPreference utility_preference(const MdpInstance& mdp) {
    mdp.scalar_reward();
    return {[mdp](const History& a, const History& b) {
                return compare_values(history_value(mdp, a), history_value(mdp, b));
            },
            PreferenceProvenance::UtilityBased};
}

HistoryPreference pareto_preference(const MdpInstance& mdp, IncomparableCounting counting) {
    mdp.vector_reward();
    return {[mdp, counting](const History& a, const History& b) {
                const Vector va = history_vector_value(mdp, a);
                const Vector vb = history_vector_value(mdp, b);
                if (va == vb) return Comparison::Equivalent;
                if (pareto_dominates(va, vb)) return Comparison::FirstPreferred;
                if (pareto_dominates(vb, va)) return Comparison::SecondPreferred;
                return counting == IncomparableCounting::Both ? Comparison::Equivalent
                                                              : Comparison::Incomparable;
            },
            PreferenceProvenance::ParetoInduced};
}

HistoryPreference scalarized_preference(const MdpInstance& mdp, ScalarizingFunction f) {
    mdp.vector_reward();
    return {[mdp, f = std::move(f)](const History& a, const History& b) {
                return compare_values(f(history_vector_value(mdp, a)), f(history_vector_value(mdp, b)));
            },
            PreferenceProvenance::Scalarized};
}

DuelResult duel_exact(const MdpInstance& mdp, const Policy& first, const Policy& second,
                      const HistoryPreference& pref, const DuelOptions& options) {
    const std::size_t horizon = duel_horizon(mdp, options);
    const EnumerationOptions enum_options{options.cap, options.start};
    const auto h1 = enumerate_histories(mdp, first, horizon, enum_options);
    const auto h2 = enumerate_histories(mdp, second, horizon, enum_options);

    DuelResult result;
    result.method = DuelMethod::Exact;
    result.horizon = horizon;

    const bool same_distribution =
        h1.size() == h2.size() && std::equal(h1.begin(), h1.end(), h2.begin(), [](const auto& a, const auto& b) {
            return a.history == b.history && a.probability == b.probability;
        });

    for (const auto& a : h1)
        for (const auto& b : h2) {
            const double w = a.probability * b.probability;
            switch (pref.compare(a.history, b.history)) {
            case Comparison::FirstPreferred: result.p += w; break;
            case Comparison::SecondPreferred: result.q += w; break;
            case Comparison::Equivalent:
                result.p += w;
                result.q += w;
                break;
            case Comparison::Incomparable: break;
            }
        }
    // Identical distributions duel symmetrically; summation order alone
    // would otherwise leave p and q a few ulps apart.
    if (same_distribution) result.q = result.p = 0.5 * (result.p + result.q);
    return result;
}

DuelResult duel_monte_carlo(const MdpInstance& mdp, const Policy& first, const Policy& second,
                            const HistoryPreference& pref, std::size_t samples, std::uint64_t seed,
                            const DuelOptions& options) {
    if (samples == 0) throw ValidationError("Monte Carlo duel needs at least one sample");
    const std::size_t horizon = duel_horizon(mdp, options);
    Rng rng(seed);
    std::size_t wins = 0, losses = 0;
    for (std::size_t n = 0; n < samples; ++n) {
        const History a = sample_history(mdp, first, horizon, rng, options.start);
        const History b = sample_history(mdp, second, horizon, rng, options.start);
        switch (pref.compare(a, b)) {
        case Comparison::FirstPreferred: ++wins; break;
        case Comparison::SecondPreferred: ++losses; break;
        case Comparison::Equivalent:
            ++wins;
            ++losses;
            break;
        case Comparison::Incomparable: break;
        }
    }
    DuelResult result;
    result.p = static_cast<double>(wins) / static_cast<double>(samples);
    result.q = static_cast<double>(losses) / static_cast<double>(samples);
    result.method = DuelMethod::MonteCarlo;
    result.samples = samples;
    result.seed = seed;
    result.horizon = horizon;
    return result;
}

Dominance probabilistic_dominance(const DuelResult& d) {
    if (std::abs(d.p - d.q) <= kTieTolerance) return Dominance::Tie;
    return d.p > d.q ? Dominance::First : Dominance::Second;
}

void Tournament::set(std::size_t i, std::size_t j, const DuelResult& d) {
    duels_[i * size_ + j] = d;
    duels_[j * size_ + i] = d.swapped();
}

Tournament build_tournament(const MdpInstance& mdp, const std::vector<Policy>& policies,
                            const HistoryPreference& pref, const TournamentOptions& options) {
    const std::size_t n = policies.size();
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) pairs.emplace_back(i, j);

    // Each pair gets its own seed derived from its position, so the result
    // does not depend on which thread ran it.
    auto run = [&](std::size_t k) {
        const auto [i, j] = pairs[k];
        if (options.method == DuelMethod::Exact)
            return duel_exact(mdp, policies[i], policies[j], pref, options.duel);
        return duel_monte_carlo(mdp, policies[i], policies[j], pref, options.samples,
                                options.seed + 0x9E3779B97F4A7C15ull * (k + 1), options.duel);
    };

    std::vector<DuelResult> results(pairs.size());
    const unsigned threads = std::max(1u, options.threads);
    if (threads == 1) {
        for (std::size_t k = 0; k < pairs.size(); ++k) results[k] = run(k);
    } else {
        std::vector<std::future<void>> workers;
        for (unsigned w = 0; w < threads; ++w)
            workers.push_back(std::async(std::launch::async, [&, w] {
                for (std::size_t k = w; k < pairs.size(); k += threads) results[k] = run(k);
            }));
        for (auto& f : workers) f.get();
    }

    Tournament t(n);
    for (std::size_t k = 0; k < pairs.size(); ++k) t.set(pairs[k].first, pairs[k].second, results[k]);
    return t;
}

std::optional<std::size_t> condorcet_winner(const Tournament& t) {
    for (std::size_t i = 0; i < t.size(); ++i) {
        bool unbeaten = true;
        for (std::size_t j = 0; j < t.size() && unbeaten; ++j)
            if (i != j && probabilistic_dominance(t.at(i, j)) == Dominance::Second) unbeaten = false;
        if (unbeaten) return i;
    }
    return std::nullopt;
}

std::vector<int> copeland_scores(const Tournament& t) {
    std::vector<int> scores(t.size(), 0);
    for (std::size_t i = 0; i < t.size(); ++i)
        for (std::size_t j = 0; j < t.size(); ++j) {
            if (i == j) continue;
            switch (probabilistic_dominance(t.at(i, j))) {
            case Dominance::First: ++scores[i]; break;
            case Dominance::Second: --scores[i]; break;
            case Dominance::Tie: break;
            }
        }
    return scores;
}

Vector borda_scores(const Tournament& t) {
    Vector scores(t.size(), 0.0);
    for (std::size_t i = 0; i < t.size(); ++i)
        for (std::size_t j = 0; j < t.size(); ++j)
            if (i != j) scores[i] += t.at(i, j).p;
    return scores;
}

std::size_t copeland_winner(const Tournament& t) {
    if (t.size() == 0) throw ValidationError("empty tournament");
    const auto scores = copeland_scores(t);
    return static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

std::size_t borda_winner(const Tournament& t) {
    if (t.size() == 0) throw ValidationError("empty tournament");
    const auto scores = borda_scores(t);
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i)
        if (scores[i] > scores[best] + kTieTolerance) best = i;
    return best;
}

std::vector<std::array<std::size_t, 3>> detect_cycles(const Tournament& t) {
    auto beats = [&](std::size_t a, std::size_t b) {
        return probabilistic_dominance(t.at(a, b)) == Dominance::First;
    };
    std::vector<std::array<std::size_t, 3>> cycles;
    const std::size_t n = t.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = i + 1; k < n; ++k)
                if (k != j && beats(i, j) && beats(j, k) && beats(k, i)) cycles.push_back({i, j, k});
    return cycles;
}

Matrix tournament_payoff(const Tournament& t) {
    Matrix m(t.size(), t.size());
    for (std::size_t i = 0; i < t.size(); ++i)
        for (std::size_t j = 0; j < t.size(); ++j) m(i, j) = t.at(i, j).p - t.at(i, j).q;
    return m;
}

MixedStrategy solve_matrix_game(const Matrix& payoff) {
    const std::size_t n = payoff.rows();
    if (n == 0) throw ValidationError("empty game");
    // max v  s.t.  sum_i w_i M[i][j] >= v for every column j,  sum w = 1,  w >= 0
    LinearProgram lp(n, ObjectiveSense::Maximize);
    const std::size_t v = lp.add_variable(1.0, -std::numeric_limits<double>::infinity());
    for (std::size_t j = 0; j < payoff.cols(); ++j) {
        Vector row(n + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) row[i] = payoff(i, j);
        row[v] = -1.0;
        lp.add_row(std::move(row), RowSense::GreaterEqual, 0.0);
    }
    Vector simplex(n + 1, 1.0);
    simplex[v] = 0.0;
    lp.add_row(std::move(simplex), RowSense::Equal, 1.0);

    const auto sol = solve_lp(lp);
    if (sol.status != LpStatus::Optimal)
        throw NumericalError("matrix game LP ended with status " + to_string(sol.status));
    MixedStrategy out;
    out.weights.assign(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(n));
    for (double& w : out.weights) w = std::max(w, 0.0);
    out.value = sol.x[v];
    return out;
}

MixedStrategy optimal_mixed_policy(const Tournament& t) { return solve_matrix_game(tournament_payoff(t)); }

} // namespace pbmo
