#pragma once

#include "hsuff/mdp.hpp"
#include "hsuff/rational.hpp"

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace hsuff {

/**
 * What a horizon-reduced learner gets to see.
 *
 * A window of length H starting at t covers tau_{t:t+H} = (s_t, a_t, r_t, ...,
 * s_{t+H}): H transitions and H + 1 states. Every state is replaced by its
 * feature phi[s]; actions and rewards inside the window are kept according
 * to the flags.
 */
struct ObservationModel {
    int window_length = 1;
    std::vector<int> window_starts;  // sorted, unique
    std::vector<std::string> phi;    // [state] -> feature label
    bool observe_actions = true;
    bool observe_rewards = true;

    /// All valid starts, identity phi, actions and rewards observed.
    static ObservationModel all_windows(const TabularMDP& mdp, int window_length);

    bool operator==(const ObservationModel&) const = default;
};

/// Throws ModelMismatch if a start is out of [0, T - H] or phi is not total.
void validate_model(const TabularMDP& mdp, const ObservationModel& model);

/// Full state/action/reward sequence of one episode: T + 1 states.
struct Trajectory {
    std::vector<StateId> states;
    std::vector<ActionId> actions;
    std::vector<Rational> rewards;

    bool operator==(const Trajectory&) const = default;
};

/// Throws InvalidTrajectory unless every step is a positive-probability
/// transition of the MDP with the matching reward and the length is T.
void validate_trajectory(const TabularMDP& mdp, const Trajectory& trajectory);

/// Post-crop, post-phi image of one window.
struct ObservedSegment {
    int start = 0;
    std::vector<std::string> features;  // H + 1 entries
    std::vector<std::string> actions;   // H entries when observed
    std::vector<Rational> rewards;      // H entries when observed

    /// Unambiguous serialisation; equal keys iff equal segments.
    std::string key() const;
    /// Human-readable rendering, e.g. "s1 -next/0-> s2".
    std::string render() const;

    bool operator==(const ObservedSegment&) const = default;
};

/// One segment per window start, in start order.
std::vector<ObservedSegment> observe(const TabularMDP& mdp, const Trajectory& trajectory,
                                     const ObservationModel& model);

struct SegmentMass {
    ObservedSegment segment;
    Rational prob;

    bool operator==(const SegmentMass&) const = default;
};

/// Exact law of the observed segments, one normalised distribution per
/// window start, keyed by ObservedSegment::key().
struct SegmentDistribution {
    ObservationModel model;
    std::string policy_name;
    std::map<int, std::map<std::string, SegmentMass>> per_start;

    /// Canonical text of the probabilities only (no provenance); equal
    /// strings iff equal distributions under the same model.
    std::string canonical() const;
};

SegmentDistribution segment_distribution(const TabularMDP& mdp, const Policy& policy,
                                         const ObservationModel& model);

/// Exact equality for every window start. Throws ModelMismatch when the two
/// distributions come from different observation models.
bool distributions_equal(const SegmentDistribution& a, const SegmentDistribution& b);

}  // namespace hsuff
