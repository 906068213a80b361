#include "pbmo/elicitation.hpp"

#include "pbmo/error.hpp"
#include "pbmo/lp.hpp"
#include "pbmo/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pbmo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Simplex and cuts over the first `dimension` variables of `lp`.
void add_polytope_rows(LinearProgram& lp, const WeightPolytope& polytope) {
    const std::size_t n = lp.variable_count();
    Vector simplex(n, 0.0);
    std::fill_n(simplex.begin(), polytope.dimension(), 1.0);
    lp.add_row(std::move(simplex), RowSense::Equal, 1.0);
    for (const Vector& c : polytope.cuts()) {
        Vector row(n, 0.0);
        std::copy(c.begin(), c.end(), row.begin());
        lp.add_row(std::move(row), RowSense::GreaterEqual, 0.0);
    }
}

Vector difference(std::span<const double> a, std::span<const double> b) {
    Vector d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return d;
}

double projected_norm(std::span<const double> c) {
    const double mean = std::accumulate(c.begin(), c.end(), 0.0) / static_cast<double>(c.size());
    double sq = 0.0;
    for (double x : c) sq += (x - mean) * (x - mean);
    return std::sqrt(sq);
}

} // namespace

WeightPolytope::WeightPolytope(std::size_t dimension) : dimension_(dimension) {
    if (dimension == 0) throw ValidationError("weight polytope needs at least one dimension");
}

void WeightPolytope::add_cut(Vector c) {
    if (c.size() != dimension_)
        throw ValidationError("cut has dimension " + std::to_string(c.size()) + ", expected " +
                              std::to_string(dimension_));
    cuts_.push_back(std::move(c));
}

bool WeightPolytope::contains(std::span<const double> w, double tol) const {
    if (w.size() != dimension_) return false;
    double total = 0.0;
    for (double x : w) {
        if (x < -tol) return false;
        total += x;
    }
    if (std::abs(total - 1.0) > tol) return false;
    for (const Vector& c : cuts_)
        if (dot(c, w) < -tol * (1.0 + inf_norm(c))) return false;
    return true;
}

std::optional<double> WeightPolytope::maximize(std::span<const double> direction) const {
    LinearProgram lp(dimension_, ObjectiveSense::Maximize);
    std::copy(direction.begin(), direction.end(), lp.objective.begin());
    add_polytope_rows(lp, *this);
    const auto sol = solve_lp(lp);
    if (sol.status == LpStatus::Infeasible) return std::nullopt;
    if (sol.status != LpStatus::Optimal)
        throw NumericalError("weight LP ended with status " + to_string(sol.status));
    return sol.objective;
}

bool WeightPolytope::feasible() const { return maximize(Vector(dimension_, 0.0)).has_value(); }

Vector WeightPolytope::center() const {
    if (dimension_ == 1) {
        if (!feasible()) throw InconsistencyError("weight polytope is empty");
        return {1.0};
    }
    LinearProgram lp(dimension_, ObjectiveSense::Maximize);
    const std::size_t r = lp.add_variable(1.0);
    add_polytope_rows(lp, *this);
    const double facet = std::sqrt(1.0 - 1.0 / static_cast<double>(dimension_));
    for (std::size_t i = 0; i < dimension_; ++i) {
        Vector row(dimension_ + 1, 0.0);
        row[i] = 1.0;
        row[r] = -facet;
        lp.add_row(std::move(row), RowSense::GreaterEqual, 0.0);
    }
    for (const Vector& c : cuts_) {
        const double norm = projected_norm(c);
        if (norm <= 1e-15) continue;
        Vector row(dimension_ + 1, 0.0);
        std::copy(c.begin(), c.end(), row.begin());
        row[r] = -norm;
        lp.add_row(std::move(row), RowSense::GreaterEqual, 0.0);
    }
    const auto sol = solve_lp(lp);
    if (sol.status == LpStatus::Infeasible) throw InconsistencyError("weight polytope is empty");
    if (sol.status != LpStatus::Optimal)
        throw NumericalError("center LP ended with status " + to_string(sol.status));
    Vector w(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(dimension_));
    for (double& x : w) x = std::max(x, 0.0);
    return w;
}

WeightPolytope update_polytope(WeightPolytope polytope, const Query& query, Answer answer) {
    if (query.u == query.v) throw ValidationError("query compares a vector with itself");
    polytope.add_cut(answer == Answer::First ? difference(query.u, query.v) : difference(query.v, query.u));
    if (!polytope.feasible()) throw InconsistencyError("answers are inconsistent: no admissible weights remain");
    return polytope;
}

SimulatedOracle SimulatedOracle::from_reward_values(std::span<const double> values) {
    if (values.empty()) throw ValidationError("oracle needs reward values");
    if (values[0] < 0.0) throw ValidationError("oracle reward values must be nonnegative");
    for (std::size_t i = 1; i < values.size(); ++i)
        if (!(values[i] > values[i - 1]))
            throw ValidationError("oracle reward values must be strictly increasing (index " + std::to_string(i) +
                                  ")");
    return from_weights(difference_weights(values));
}

SimulatedOracle SimulatedOracle::from_weights(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("oracle weights must be finite and nonnegative");
        total += w;
    }
    if (!(total > 0.0)) throw ValidationError("oracle weights are all zero");
    Vector w(weights.begin(), weights.end());
    for (double& x : w) x /= total;
    return SimulatedOracle(std::move(w));
}

Answer SimulatedOracle::answer(const Query& q) const {
    return dot(weights_, q.u) >= dot(weights_, q.v) ? Answer::First : Answer::Second;
}

std::vector<std::size_t> feasibly_best(const WeightPolytope& polytope, const std::vector<Vector>& candidates,
                                       double tol) {
    std::vector<std::size_t> best;
    const std::size_t d = polytope.dimension();
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        LinearProgram lp(d, ObjectiveSense::Maximize);
        const std::size_t t = lp.add_variable(1.0, -kInf);
        add_polytope_rows(lp, polytope);
        double scale = 1.0;
        for (std::size_t j = 0; j < candidates.size(); ++j) {
            if (j == k) continue;
            Vector row(d + 1, 0.0);
            for (std::size_t i = 0; i < d; ++i) row[i] = candidates[k][i] - candidates[j][i];
            scale = std::max(scale, inf_norm(row));
            row[t] = -1.0;
            lp.add_row(std::move(row), RowSense::GreaterEqual, 0.0);
        }
        if (candidates.size() == 1) {
            best.push_back(k);
            continue;
        }
        const auto sol = solve_lp(lp);
        if (sol.status == LpStatus::Infeasible) throw InconsistencyError("weight polytope is empty");
        if (sol.status != LpStatus::Optimal)
            throw NumericalError("feasibly-best LP ended with status " + to_string(sol.status));
        if (sol.objective >= -tol * scale) best.push_back(k);
    }
    return best;
}

ElicitationResult elicit_over(std::vector<ParetoMember> candidates, const SimulatedOracle& oracle,
                              const ElicitationOptions& options) {
    if (candidates.empty()) throw ValidationError("elicitation needs a nonempty cover");
    const std::size_t d = candidates.front().value.size();
    if (oracle.weights().size() != d)
        throw ValidationError("oracle has " + std::to_string(oracle.weights().size()) + " weights, instance has " +
                              std::to_string(d) + " objectives");

    ElicitationResult result;
    result.candidates = std::move(candidates);
    result.polytope = WeightPolytope(d);
    std::vector<Vector> values;
    for (const auto& c : result.candidates) values.push_back(c.value);

    std::vector<std::size_t> remaining(values.size());
    std::iota(remaining.begin(), remaining.end(), std::size_t{0});

    for (;;) {
        std::optional<Query> best;
        double best_score = 0.0;
        for (std::size_t a = 0; a < remaining.size(); ++a)
            for (std::size_t b = a + 1; b < remaining.size(); ++b) {
                const Vector& u = values[remaining[a]];
                const Vector& v = values[remaining[b]];
                const Vector diff = difference(u, v);
                const double threshold = options.tol * (1.0 + inf_norm(diff));
                const auto forward = result.polytope.maximize(diff);
                const auto backward = result.polytope.maximize(difference(v, u));
                if (!forward || !backward) throw InconsistencyError("weight polytope is empty");
                if (*forward <= threshold || *backward <= threshold) continue;
                const double score = std::min(*forward, *backward);
                if (!best || score > best_score) {
                    best = Query{remaining[a], remaining[b], u, v};
                    best_score = score;
                }
            }
        if (!best) {
            result.converged = true;
            break;
        }
        if (result.rounds.size() >= options.max_queries) break;

        ElicitationRound round;
        round.query = *best;
        round.answer = oracle.answer(*best);
        round.disagreement = best_score;
        result.polytope = update_polytope(std::move(result.polytope), *best, round.answer);
        const std::size_t loser = round.answer == Answer::First ? best->second : best->first;
        std::erase(remaining, loser);
        round.remaining = remaining;
        round.feasibly_best = feasibly_best(result.polytope, values, options.tol);
        if (options.observer) options.observer(result.polytope, round);
        result.rounds.push_back(std::move(round));
    }

    result.center = result.polytope.center();
    result.recommended = remaining.front();
    for (std::size_t k : remaining)
        if (dot(result.center, values[k]) > dot(result.center, values[result.recommended]) + 1e-12)
            result.recommended = k;
    return result;
}

ElicitationResult elicit_loop(const MdpInstance& momdp, const SimulatedOracle& oracle,
                              const ElicitationOptions& options) {
    const ParetoSet frontier = pareto_frontier(momdp, options.cap, 1e-11);
    std::vector<Vector> points;
    for (const auto& m : frontier.members) points.push_back(m.value);
    auto cover = epsilon_cover(points, options.epsilon);
    std::sort(cover.begin(), cover.end());
    std::vector<ParetoMember> candidates;
    for (std::size_t k : cover) candidates.push_back(frontier.members[k]);
    return elicit_over(std::move(candidates), oracle, options);
}

} // namespace pbmo
