#pragma once

// From symbolic rewards to vector rewards.
//
// A symbolic instance only says which of the unknown values x_1..x_d each
// (state, action) pair yields. Two constructions recover a multiobjective
// instance whose Pareto dominance is consistent with every admissible
// assignment of the x's:
//
//  * ordered rewards: the order x_1 < ... < x_d is known. The counting
//    reward 1_i is replaced by its decumulative (suffix-sum) vector, and
//    v(s) = (x_1, x_2 - x_1, ..., x_d - x_{d-1}) . v_vec(s).
//
//  * ordered histories: d histories h_1 < ... < h_d are ranked. With H the
//    matrix of their discounted count vectors, label i yields the
//    decumulative of column i of H^-1, and v(s) = (r_1, r_2 - r_1, ...) .
//    v_vec(s) where r_i is the (unknown) value of h_i.

#include "pbmo/momdp.hpp"

#include <optional>
#include <string>

namespace pbmo {

/// Labels listed from smallest to largest value (zero-based label indices).
struct RewardOrder {
    std::vector<std::size_t> ascending;
};

void validate_order(const RewardOrder& order, std::size_t labels);

/// Relabels the symbolic reward so that the order becomes x_1 < ... < x_d.
MdpInstance canonicalize(const MdpInstance& pbmdp, const RewardOrder& order);

/// Histories listed from least to most preferred.
struct OrderedHistories {
    std::vector<History> histories;
};

struct BasisMatrix {
    Matrix h;            ///< columns are the count vectors of the ordered histories
    Matrix h_inv;
    double condition = 0.0; ///< ||H||_inf * ||H^-1||_inf
};

/// Counting reward: label i becomes the canonical vector 1_i.
VectorReward counting_reward(const MdpInstance& pbmdp);

/// v_k = sum_{j >= k} v_j
Vector decumulative(std::span<const double> v);

/// Inverse of decumulative: w_k = v_k - v_{k+1}, w_d = v_d.
Vector first_difference(std::span<const double> v);

/// Vector instance with reward decumulative(1_i) for label x_i after
/// canonicalizing with `order`.
MdpInstance ordered_reward_transform(const MdpInstance& pbmdp, const RewardOrder& order);

/// Discounted sum of canonical label indicators along h.
Vector history_count_vector(const MdpInstance& pbmdp, const History& h);

/// Throws IndependenceError when a pivot falls below 1e-10 * ||H||_inf, or
/// when ||H H^-1 - I||_inf exceeds 1e-8.
BasisMatrix history_basis_matrix(const MdpInstance& pbmdp, const OrderedHistories& ordered);

MdpInstance ordered_history_transform(const MdpInstance& pbmdp, const OrderedHistories& ordered);

/// Same, reusing an already computed basis.
MdpInstance ordered_history_transform(const MdpInstance& pbmdp, const BasisMatrix& basis);

struct LemmaReport {
    double counting_residual = 0.0;     ///< max_s |v(s) - x . v_bar(s)| (first identity only)
    double decumulative_residual = 0.0; ///< max_s |v(s) - weights . v_vec(s)|
    double max_residual() const { return std::max(counting_residual, decumulative_residual); }
};

/// Scalar instance with reward x[label(s, a)].
MdpInstance substitute_values(const MdpInstance& pbmdp, std::span<const double> values);

/// x (for the canonical order) must be strictly increasing.
LemmaReport verify_lemma1(const MdpInstance& pbmdp, const RewardOrder& order, std::span<const double> values,
                          const Policy& policy, double tol = 1e-11);

/// x indexed by the original labels. The history values r_i = x . r_bar_i
/// must be strictly increasing; otherwise ValidationError.
LemmaReport verify_lemma2(const MdpInstance& pbmdp, const OrderedHistories& ordered,
                          std::span<const double> values, const Policy& policy, double tol = 1e-11,
                          double max_condition = 1e6);

/// Values r_i = x . r_bar_i of the ordered histories.
Vector history_values(const BasisMatrix& basis, std::span<const double> values);

/// (x_1, x_2 - x_1, ..., x_d - x_{d-1}): the coefficients that turn
/// decumulative coordinates back into a scalar value.
Vector difference_weights(std::span<const double> values);

struct SoundnessReport {
    bool passed = true;
    std::size_t dominant_pairs = 0;  ///< (policy, policy, state) triples with statewise dominance
    std::size_t checks = 0;          ///< scalar comparisons performed
    std::optional<std::string> counterexample;
};

/**
 * For every pair of enumerated deterministic policies and every state where
 * the transformed vector value of one Pareto-dominates the other, check that
 * the scalar value under each supplied x (indexed like the pbmdp's labels)
 * preserves the order. Stops at the first counterexample.
 */
SoundnessReport dominance_soundness_check(const MdpInstance& pbmdp, const MdpInstance& transformed,
                                          const std::vector<Vector>& sampled_values,
                                          std::size_t cap = kDefaultPolicyCap, double tol = 1e-9);

/// Strictly increasing values in [lo, hi).
Vector sample_increasing_values(std::size_t d, Rng& rng, double lo = 0.0, double hi = 10.0);

/// Label values x for which the ordered histories get the strictly
/// increasing values r (x = H^-T r).
Vector values_from_history_values(const BasisMatrix& basis, std::span<const double> history_values);

} // namespace pbmo
