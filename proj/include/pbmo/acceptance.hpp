#pragma once

// Property- and oracle-based acceptance checks shared by the test runner and
// the `selftest` command.

#include "pbmo/io.hpp"

#include <functional>

namespace pbmo {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string summary; ///< one line, deterministic for a given seed
    Json metrics;        ///< deterministic for a given seed
    double seconds = 0.0;
    double time_limit = 0.0; ///< 0 when the criterion has no runtime bound
};

struct AcceptanceOptions {
    std::uint64_t seed = 1;
    std::vector<int> only; ///< empty runs everything
    std::function<void(const CriterionResult&)> on_result;
};

/// Criteria 1-9. Reproducibility of the emitted document is checked by the
/// caller, which can run the command twice.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

/// The random-instance suites behind criteria 1-3 with a chosen trial count.
CriterionResult run_lemma_trials(int lemma, std::size_t trials, std::uint64_t seed);

Json acceptance_document(const std::vector<CriterionResult>& results, std::uint64_t seed, bool wall_time);

std::string format_criterion(const CriterionResult& r);

/// Fixtures used by the suite, the CLI and the unit tests.
namespace fixtures {

/// Start state 0; action k rolls die k. Faces A = {2, 4, 9}, B = {1, 6, 8},
/// C = {3, 5, 7}; each face state pays its face value then moves to an
/// absorbing zero-reward state. Discount 0.5.
MdpInstance intransitive_dice();
/// Policies that pick die 0, 1 and 2 at the start state.
std::vector<Policy> dice_policies();
inline constexpr std::size_t kDiceStart = 0;
inline constexpr std::size_t kDiceHorizon = 2;

/// Two absorbing states with rewards (1, 0) and (0, 1), uniform start,
/// discount 0: max-component scalarization gives 1 on histories, 0.5 on values.
MdpInstance level_divergence();

/// One state, action 0 yields label 1, action 1 yields label 2.
MdpInstance two_label_choice();

/// One state, one action, reward 1, discount 0.5: v = 2.
MdpInstance single_state();

} // namespace fixtures

} // namespace pbmo
