#pragma once

// Seeded random instances for property tests and the acceptance suite.

#include "pbmo/transforms.hpp"

namespace pbmo {

struct InstanceShape {
    std::size_t min_states = 1;
    std::size_t max_states = 5;
    std::size_t min_actions = 1;
    std::size_t max_actions = 3;
    double min_discount = 0.5;
    double max_discount = 0.95;
    std::size_t max_successors = 3; ///< nonzero entries per transition row
};

/// Random dynamics and a strictly positive initial distribution; reward left scalar zero.
MdpInstance random_dynamics(Rng& rng, const InstanceShape& shape);

MdpInstance random_scalar_instance(Rng& rng, const InstanceShape& shape, double lo = -1.0, double hi = 1.0);

MdpInstance random_vector_instance(Rng& rng, const InstanceShape& shape, std::size_t dimension, double lo = 0.0,
                                   double hi = 1.0);

/// Every label is used by at least one (state, action) pair; needs
/// states * actions >= labels.
MdpInstance random_symbolic_instance(Rng& rng, const InstanceShape& shape, std::size_t labels);

DeterministicPolicy random_deterministic_policy(const MdpInstance& mdp, Rng& rng);

RandomizedPolicy random_randomized_policy(const MdpInstance& mdp, Rng& rng);

/// Random permutation of the labels.
RewardOrder random_order(std::size_t labels, Rng& rng);

struct HistoryFixture {
    OrderedHistories ordered;
    Vector values; ///< label values under which the ordering is strict
    BasisMatrix basis;
};

/**
 * Samples histories of lengths 1..max_length until their count vectors span
 * the label space, draws random label values, and sorts the histories by
 * value. Returns nullopt when no well-conditioned basis turns up within
 * `attempts` tries.
 */
std::optional<HistoryFixture> random_history_fixture(const MdpInstance& pbmdp, Rng& rng,
                                                     double max_condition = 1e6, std::size_t max_length = 4,
                                                     std::size_t attempts = 50);

} // namespace pbmo
