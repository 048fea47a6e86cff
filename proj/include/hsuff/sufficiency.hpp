#pragma once

#include "hsuff/mdp.hpp"
#include "hsuff/observation.hpp"
#include "hsuff/rational.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace hsuff {

inline constexpr std::size_t default_policy_cap = 1'000'000;

/// Which deterministic policies get enumerated.
struct PolicyClassOptions {
    bool stationary = true;
    std::size_t cap = default_policy_cap;
    unsigned workers = 1;
};

/// Records the class a verdict quantifies over.
struct PolicyClassSummary {
    bool stationary = true;
    BigInt total;
    std::size_t enumerated = 0;
    bool truncated = false;

    std::string describe() const;
};

struct Witness {
    std::size_t first_index = 0;
    std::size_t second_index = 0;
    Policy first;
    Policy second;
    Rational first_return;
    Rational second_return;
    Rational gap;  // first_return - second_return
};

/// sufficient == !witness.has_value().
struct SufficiencyVerdict {
    bool sufficient = true;
    std::optional<Witness> witness;
    PolicyClassSummary policy_class;
    std::size_t buckets = 0;

    /// "sufficient", "not-sufficient", or "sufficient over enumerated subset only".
    std::string label() const;
};

/**
 * Decides H-sufficiency over the enumerated deterministic class: policies
 * are bucketed by their exact segment distribution, and the problem is
 * sufficient iff every bucket carries a single full return. The witness is
 * the lexicographically first pair (i < j) sharing a bucket with different
 * returns.
 */
SufficiencyVerdict check_h_sufficiency(const TabularMDP& mdp, const ObservationModel& model,
                                       const PolicyClassOptions& options = {});

/// Re-evaluates a witness from scratch; true iff the distributions are equal
/// and the returns and gap match the recorded values exactly.
bool replay_witness(const TabularMDP& mdp, const ObservationModel& model, const Witness& witness);

struct OrderingReport {
    int h = 0;
    PolicyClassSummary policy_class;
    std::vector<Rational> truncated_values;  // J_h per enumerated policy
    std::vector<Rational> full_values;       // J per enumerated policy
    std::vector<std::size_t> truncated_argmax;
    std::vector<std::size_t> full_argmax;
    /// Argmax policies collapsed by on-trajectory behaviour (the actions they
    /// take on cells they reach with positive probability); one
    /// representative index per behaviour.
    std::vector<std::size_t> truncated_argmax_behaviours;
    std::vector<std::size_t> full_argmax_behaviours;
    bool argmax_intersect = false;
    /// sign(J_h(i) - J_h(j)) == sign(J(i) - J(j)) for every pair.
    bool ordering_consistent = true;
    std::optional<std::pair<std::size_t, std::size_t>> disagreeing_pair;
};

OrderingReport check_objective_consistency(const TabularMDP& mdp, int h, const PolicyClassOptions& options = {});

/// Cells (t, s) reached with positive probability, with the action taken;
/// equal keys mean equal trajectory laws.
std::string behaviour_key(const TabularMDP& mdp, const Policy& policy);

}  // namespace hsuff
