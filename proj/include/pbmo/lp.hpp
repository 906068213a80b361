#pragma once

// Dense two-phase simplex with Bland's rule. Sized for desk-scale problems
// (a few thousand variables at most); every run is fully deterministic.

#include "pbmo/linalg.hpp"

#include <limits>
#include <string>

namespace pbmo {

enum class ObjectiveSense { Minimize, Maximize };
enum class RowSense { LessEqual, GreaterEqual, Equal };

struct LinearProgram {
    struct Row {
        Vector coefficients;
        RowSense sense = RowSense::LessEqual;
        double rhs = 0.0;
    };

    ObjectiveSense sense = ObjectiveSense::Minimize;
    Vector objective;
    std::vector<Row> rows;
    Vector lower; ///< per variable; -inf allowed
    Vector upper; ///< per variable; +inf allowed

    /// Creates `n` variables with bounds [0, +inf) and zero cost.
    explicit LinearProgram(std::size_t n = 0, ObjectiveSense s = ObjectiveSense::Minimize)
        : sense(s), objective(n, 0.0), lower(n, 0.0), upper(n, std::numeric_limits<double>::infinity()) {}

    std::size_t variable_count() const { return objective.size(); }

    /// Appends a variable and returns its index.
    std::size_t add_variable(double cost, double lo = 0.0,
                             double hi = std::numeric_limits<double>::infinity());

    void add_row(Vector coefficients, RowSense row_sense, double rhs);
};

enum class LpStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

std::string to_string(LpStatus status);

struct LpSolution {
    LpStatus status = LpStatus::NumericalFailure;
    Vector x;
    double objective = 0.0;
    std::size_t pivots = 0;
};

/// Largest violation of any row or bound by `x` (0 when feasible).
double max_violation(const LinearProgram& lp, const Vector& x);

/// Optimal solutions are checked against the original rows and bounds; a
/// violation above 1e-8 (relative to the row scale) is reported as
/// NumericalFailure rather than Optimal.
LpSolution solve_lp(const LinearProgram& lp);

} // namespace pbmo
