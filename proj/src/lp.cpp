#include "pbmo/lp.hpp"

#include "pbmo/error.hpp"

#include <algorithm>
#include <cmath>

namespace pbmo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCostTolerance = 1e-10;
constexpr double kPivotTolerance = 1e-10;
constexpr double kFeasibilityTolerance = 1e-8;
constexpr std::size_t kMaxPivots = 200'000;

/// How an original variable maps onto nonnegative standard-form columns:
/// x = offset + sign * y_col  (+ second column with negative sign when free).
struct VariableMap {
    double offset = 0.0;
    double sign = 1.0;
    std::size_t column = 0;
    std::ptrdiff_t negative_column = -1;
};

/// Tableau over columns [0, n) with `rows` constraint rows and a final cost row.
class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_((rows + 1) * (cols + 1), 0.0) {}

    double& at(std::size_t r, std::size_t c) { return data_[r * (cols_ + 1) + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * (cols_ + 1) + c]; }
    double& rhs(std::size_t r) { return at(r, cols_); }
    double rhs(std::size_t r) const { return at(r, cols_); }
    double& cost(std::size_t c) { return at(rows_, c); }
    double cost(std::size_t c) const { return at(rows_, c); }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    void pivot(std::size_t row, std::size_t col) {
        const double p = at(row, col);
        for (std::size_t c = 0; c <= cols_; ++c) at(row, c) /= p;
        at(row, col) = 1.0;
        for (std::size_t r = 0; r <= rows_; ++r) {
            if (r == row) continue;
            const double f = at(r, col);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c <= cols_; ++c) at(r, c) -= f * at(row, c);
            at(r, col) = 0.0;
        }
    }

    void drop_row(std::size_t row) {
        // move the last constraint row into `row`, then shift the cost row up
        const std::size_t w = cols_ + 1;
        if (row != rows_ - 1)
            std::copy(data_.begin() + (rows_ - 1) * w, data_.begin() + rows_ * w, data_.begin() + row * w);
        std::copy(data_.begin() + rows_ * w, data_.begin() + (rows_ + 1) * w, data_.begin() + (rows_ - 1) * w);
        --rows_;
        data_.resize((rows_ + 1) * w);
    }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
};

enum class PhaseResult { Optimal, Unbounded, PivotLimit };

/// Bland's rule: lowest-index improving column enters; ties in the ratio
/// test leave by lowest basic variable index.
PhaseResult run_simplex(Tableau& t, std::vector<std::size_t>& basis, const std::vector<bool>& allowed,
                        std::size_t& pivots) {
    while (true) {
        std::ptrdiff_t entering = -1;
        for (std::size_t c = 0; c < t.cols(); ++c)
            if (allowed[c] && t.cost(c) < -kCostTolerance) {
                entering = static_cast<std::ptrdiff_t>(c);
                break;
            }
        if (entering < 0) return PhaseResult::Optimal;
        const auto col = static_cast<std::size_t>(entering);

        std::ptrdiff_t leaving = -1;
        double best_ratio = kInf;
        for (std::size_t r = 0; r < t.rows(); ++r) {
            const double a = t.at(r, col);
            if (a <= kPivotTolerance) continue;
            const double ratio = std::max(t.rhs(r), 0.0) / a;
            const bool better = leaving < 0 || ratio < best_ratio - 1e-12;
            const bool tie = !better && ratio <= best_ratio + 1e-12 &&
                             basis[r] < basis[static_cast<std::size_t>(leaving)];
            if (better || tie) {
                best_ratio = better ? ratio : std::min(best_ratio, ratio);
                leaving = static_cast<std::ptrdiff_t>(r);
            }
        }
        if (leaving < 0) return PhaseResult::Unbounded;
        if (++pivots > kMaxPivots) return PhaseResult::PivotLimit;
        t.pivot(static_cast<std::size_t>(leaving), col);
        basis[static_cast<std::size_t>(leaving)] = col;
    }
}

} // namespace

std::size_t LinearProgram::add_variable(double cost, double lo, double hi) {
    objective.push_back(cost);
    lower.push_back(lo);
    upper.push_back(hi);
    for (auto& row : rows) row.coefficients.push_back(0.0);
    return objective.size() - 1;
}

void LinearProgram::add_row(Vector coefficients, RowSense row_sense, double rhs) {
    if (coefficients.size() != variable_count())
        throw ValidationError("LP row has " + std::to_string(coefficients.size()) + " coefficients, expected " +
                              std::to_string(variable_count()));
    rows.push_back({std::move(coefficients), row_sense, rhs});
}

std::string to_string(LpStatus status) {
    switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::NumericalFailure: return "numerical-failure";
    }
    return "unknown";
}

double max_violation(const LinearProgram& lp, const Vector& x) {
    double worst = 0.0;
    for (std::size_t j = 0; j < lp.variable_count(); ++j) {
        worst = std::max(worst, lp.lower[j] - x[j]);
        worst = std::max(worst, x[j] - lp.upper[j]);
    }
    for (const auto& row : lp.rows) {
        double lhs = 0.0, scale = std::max(1.0, std::abs(row.rhs));
        for (std::size_t j = 0; j < x.size(); ++j) {
            lhs += row.coefficients[j] * x[j];
            scale = std::max(scale, std::abs(row.coefficients[j] * x[j]));
        }
        double v = 0.0;
        switch (row.sense) {
        case RowSense::LessEqual: v = lhs - row.rhs; break;
        case RowSense::GreaterEqual: v = row.rhs - lhs; break;
        case RowSense::Equal: v = std::abs(lhs - row.rhs); break;
        }
        worst = std::max(worst, v / scale);
    }
    return std::max(worst, 0.0);
}

LpSolution solve_lp(const LinearProgram& lp) {
    const std::size_t n = lp.variable_count();
    if (lp.lower.size() != n || lp.upper.size() != n)
        throw ValidationError("LP bounds must have one entry per variable");
    for (double c : lp.objective)
        if (!std::isfinite(c)) throw ValidationError("LP objective coefficients must be finite");
    for (const auto& row : lp.rows) {
        if (row.coefficients.size() != n) throw ValidationError("LP row length mismatch");
        for (double a : row.coefficients)
            if (!std::isfinite(a)) throw ValidationError("LP row coefficients must be finite");
        if (!std::isfinite(row.rhs)) throw ValidationError("LP right-hand sides must be finite");
    }

    LpSolution solution;
    for (std::size_t j = 0; j < n; ++j)
        if (lp.lower[j] > lp.upper[j]) {
            solution.status = LpStatus::Infeasible;
            return solution;
        }

    // ---- standard form: min c'y, A y = b, y >= 0, b >= 0
    std::vector<VariableMap> vars(n);
    std::size_t columns = 0;
    struct StdRow {
        std::vector<std::pair<std::size_t, double>> terms; // over structural columns
        RowSense sense;
        double rhs;
    };
    std::vector<StdRow> std_rows;
    for (std::size_t j = 0; j < n; ++j) {
        const double lo = lp.lower[j], hi = lp.upper[j];
        if (std::isfinite(lo)) {
            vars[j] = {lo, 1.0, columns++, -1};
            if (std::isfinite(hi)) std_rows.push_back({{{vars[j].column, 1.0}}, RowSense::LessEqual, hi - lo});
        } else if (std::isfinite(hi)) {
            vars[j] = {hi, -1.0, columns++, -1};
        } else {
            vars[j] = {0.0, 1.0, columns, static_cast<std::ptrdiff_t>(columns + 1)};
            columns += 2;
        }
    }
    for (const auto& row : lp.rows) {
        StdRow r{{}, row.sense, row.rhs};
        for (std::size_t j = 0; j < n; ++j) {
            const double a = row.coefficients[j];
            if (a == 0.0) continue;
            r.rhs -= a * vars[j].offset;
            r.terms.emplace_back(vars[j].column, a * vars[j].sign);
            if (vars[j].negative_column >= 0)
                r.terms.emplace_back(static_cast<std::size_t>(vars[j].negative_column), -a);
        }
        std_rows.push_back(std::move(r));
    }

    // slack/surplus columns, then artificials
    const std::size_t m = std_rows.size();
    std::vector<std::ptrdiff_t> slack_of(m, -1);
    for (std::size_t i = 0; i < m; ++i)
        if (std_rows[i].sense != RowSense::Equal) slack_of[i] = static_cast<std::ptrdiff_t>(columns++);
    std::vector<double> row_sign(m, 1.0);
    std::vector<std::ptrdiff_t> basic_slack(m, -1);
    std::size_t artificial_count = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double slack_coef = std_rows[i].sense == RowSense::LessEqual ? 1.0
                                  : std_rows[i].sense == RowSense::GreaterEqual ? -1.0
                                                                                : 0.0;
        if (std_rows[i].rhs < 0.0) row_sign[i] = -1.0;
        if (slack_of[i] >= 0 && slack_coef * row_sign[i] > 0.0)
            basic_slack[i] = slack_of[i];
        else
            ++artificial_count;
    }
    const std::size_t first_artificial = columns;
    columns += artificial_count;

    Tableau t(m, columns);
    std::vector<std::size_t> basis(m);
    std::size_t next_artificial = first_artificial;
    for (std::size_t i = 0; i < m; ++i) {
        const double sgn = row_sign[i];
        for (const auto& [c, a] : std_rows[i].terms) t.at(i, c) += sgn * a;
        if (slack_of[i] >= 0)
            t.at(i, static_cast<std::size_t>(slack_of[i])) =
                sgn * (std_rows[i].sense == RowSense::LessEqual ? 1.0 : -1.0);
        t.rhs(i) = sgn * std_rows[i].rhs;
        if (basic_slack[i] >= 0) {
            basis[i] = static_cast<std::size_t>(basic_slack[i]);
        } else {
            t.at(i, next_artificial) = 1.0;
            basis[i] = next_artificial++;
        }
    }

    // ---- phase 1: minimise the sum of artificials
    std::vector<bool> allowed(columns, true);
    if (artificial_count > 0) {
        for (std::size_t i = 0; i < m; ++i)
            if (basis[i] >= first_artificial) {
                for (std::size_t c = 0; c < columns; ++c)
                    if (c < first_artificial) t.cost(c) -= t.at(i, c);
                t.rhs(m) -= t.rhs(i);
            }
        const auto phase1 = run_simplex(t, basis, allowed, solution.pivots);
        if (phase1 != PhaseResult::Optimal) {
            solution.status = LpStatus::NumericalFailure;
            return solution;
        }
        double scale = 1.0;
        for (std::size_t i = 0; i < m; ++i) scale = std::max(scale, std::abs(std_rows[i].rhs));
        if (-t.rhs(t.rows()) > kFeasibilityTolerance * scale) {
            solution.status = LpStatus::Infeasible;
            return solution;
        }
        // drive remaining (zero-level) artificials out of the basis
        for (std::size_t i = 0; i < t.rows();) {
            if (basis[i] < first_artificial) {
                ++i;
                continue;
            }
            std::ptrdiff_t col = -1;
            for (std::size_t c = 0; c < first_artificial; ++c)
                if (std::abs(t.at(i, c)) > 1e-9) {
                    col = static_cast<std::ptrdiff_t>(c);
                    break;
                }
            if (col >= 0) {
                t.pivot(i, static_cast<std::size_t>(col));
                basis[i] = static_cast<std::size_t>(col);
                ++i;
            } else {
                // redundant row
                t.drop_row(i);
                basis[i] = basis.back();
                basis.pop_back();
            }
        }
        for (std::size_t c = first_artificial; c < columns; ++c) allowed[c] = false;
    }

    // ---- phase 2
    const double direction = lp.sense == ObjectiveSense::Maximize ? -1.0 : 1.0;
    Vector std_cost(columns, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const double c = direction * lp.objective[j];
        std_cost[vars[j].column] += c * vars[j].sign;
        if (vars[j].negative_column >= 0) std_cost[static_cast<std::size_t>(vars[j].negative_column)] -= c;
    }
    for (std::size_t c = 0; c < columns; ++c) t.cost(c) = allowed[c] ? std_cost[c] : 0.0;
    t.rhs(t.rows()) = 0.0;
    for (std::size_t i = 0; i < t.rows(); ++i) {
        const double cb = std_cost[basis[i]];
        if (cb == 0.0) continue;
        for (std::size_t c = 0; c <= columns; ++c) t.at(t.rows(), c) -= cb * t.at(i, c);
    }
    const auto phase2 = run_simplex(t, basis, allowed, solution.pivots);
    if (phase2 == PhaseResult::Unbounded) {
        solution.status = LpStatus::Unbounded;
        return solution;
    }
    if (phase2 == PhaseResult::PivotLimit) {
        solution.status = LpStatus::NumericalFailure;
        return solution;
    }

    Vector y(columns, 0.0);
    for (std::size_t i = 0; i < t.rows(); ++i) y[basis[i]] = std::max(t.rhs(i), 0.0);
    solution.x.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double v = vars[j].offset + vars[j].sign * y[vars[j].column];
        if (vars[j].negative_column >= 0) v -= y[static_cast<std::size_t>(vars[j].negative_column)];
        solution.x[j] = v;
    }
    solution.objective = dot(lp.objective, solution.x);
    solution.status = max_violation(lp, solution.x) <= kFeasibilityTolerance ? LpStatus::Optimal
                                                                             : LpStatus::NumericalFailure;
    return solution;
}

} // namespace pbmo
