#pragma once

// Preference relations over histories, probabilistic dominance between
// policies, and tournament analytics (Condorcet, Copeland, Borda, cycles,
// optimal mixed policies).

#include "pbmo/momdp.hpp"

#include <array>
#include <functional>
#include <optional>

namespace pbmo {

enum class Comparison { FirstPreferred, SecondPreferred, Equivalent, Incomparable };

enum class PreferenceProvenance { UtilityBased, ParetoInduced, Scalarized, UserSupplied };

std::string to_string(PreferenceProvenance p);

/// Deterministic comparator over pairs of histories.
struct HistoryPreference {
    std::function<Comparison(const History&, const History&)> compare;
    PreferenceProvenance provenance = PreferenceProvenance::UserSupplied;
};

/// Compare by the scalar discounted value of histories (scalar reward).
HistoryPreference utility_preference(const MdpInstance& mdp);

/// How Pareto-incomparable history pairs enter the duel probabilities.
enum class IncomparableCounting {
    Neither, ///< counted on neither side, so p + q <= 1
    Both,    ///< treated as equivalence, counted on both sides
};

/// Compare vector history values by Pareto dominance (vector reward).
HistoryPreference pareto_preference(const MdpInstance& mdp,
                                    IncomparableCounting counting = IncomparableCounting::Neither);

/// Compare f(vector history value) totally (vector reward).
HistoryPreference scalarized_preference(const MdpInstance& mdp, ScalarizingFunction f);

enum class DuelMethod { Exact, MonteCarlo };

struct DuelResult {
    double p = 0.0; ///< P[H_pi at least as good as H_pi']
    double q = 0.0; ///< P[H_pi' at least as good as H_pi]
    DuelMethod method = DuelMethod::Exact;
    std::size_t samples = 0; ///< Monte Carlo only
    std::uint64_t seed = 0;  ///< Monte Carlo only
    std::size_t horizon = 0;

    /// Same duel seen from the other side.
    DuelResult swapped() const {
        DuelResult r = *this;
        std::swap(r.p, r.q);
        return r;
    }
};

struct DuelOptions {
    std::size_t horizon = 0; ///< 0 picks truncation_horizon(gamma, truncation)
    double truncation = 1e-6;
    std::size_t cap = kDefaultHistoryCap;
    std::optional<std::size_t> start; ///< both histories start here instead of from mu
};

/// Histories of the two policies are drawn independently; exact over the
/// product of both enumerated history distributions.
DuelResult duel_exact(const MdpInstance& mdp, const Policy& first, const Policy& second,
                      const HistoryPreference& pref, const DuelOptions& options = {});

DuelResult duel_monte_carlo(const MdpInstance& mdp, const Policy& first, const Policy& second,
                            const HistoryPreference& pref, std::size_t samples, std::uint64_t seed,
                            const DuelOptions& options = {});

enum class Dominance { First, Second, Tie };

/// Tie when |p - q| <= 1e-12.
Dominance probabilistic_dominance(const DuelResult& d);

/// Square matrix of duels; entry (i, j) reports p = P[i beats-or-ties j].
class Tournament {
public:
    explicit Tournament(std::size_t size) : size_(size), duels_(size * size) {}

    std::size_t size() const { return size_; }
    const DuelResult& at(std::size_t i, std::size_t j) const { return duels_[i * size_ + j]; }

    /// Sets (i, j) and the mirrored (j, i).
    void set(std::size_t i, std::size_t j, const DuelResult& d);

private:
    std::size_t size_;
    std::vector<DuelResult> duels_;
};

struct TournamentOptions {
    DuelMethod method = DuelMethod::Exact;
    std::size_t samples = 10'000;
    std::uint64_t seed = 0;
    DuelOptions duel;
    unsigned threads = 1; ///< >1 fills independent duels concurrently
};

/// Duels every unordered pair once and mirrors it, so (i, j).p == (j, i).q
/// exactly. Concurrent filling yields the same matrix as sequential filling.
Tournament build_tournament(const MdpInstance& mdp, const std::vector<Policy>& policies,
                            const HistoryPreference& pref, const TournamentOptions& options = {});

/// Index whose every off-diagonal duel is a win or a tie (lowest if several).
std::optional<std::size_t> condorcet_winner(const Tournament& t);

std::vector<int> copeland_scores(const Tournament& t);
Vector borda_scores(const Tournament& t);
std::size_t copeland_winner(const Tournament& t);
std::size_t borda_winner(const Tournament& t);

/// Strict 3-cycles i > j > k > i, each reported once with its smallest index first.
std::vector<std::array<std::size_t, 3>> detect_cycles(const Tournament& t);

struct MixedStrategy {
    Vector weights;
    double value = 0.0; ///< guaranteed expected payoff of `weights`
};

/// Antisymmetric payoff M[i][j] = p_ij - q_ij.
Matrix tournament_payoff(const Tournament& t);

/// Maximin strategy of a zero-sum matrix game (row player maximises).
MixedStrategy solve_matrix_game(const Matrix& payoff);

/// Optimal mixed policy: maximin distribution over the tournament's policies.
MixedStrategy optimal_mixed_policy(const Tournament& t);

} // namespace pbmo
