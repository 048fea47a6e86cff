#pragma once

#include "hsuff/mdp.hpp"
#include "hsuff/observation.hpp"
#include "hsuff/offline_data.hpp"

#include <cstdint>
#include <string>
#include <string_view>

namespace hsuff {

// Line-oriented text formats. '#' starts a comment; tokens are separated by
// whitespace; labels may not contain whitespace or '#'. Rationals are "p/q"
// (or "p"). Errors carry 1-based line/column positions; an empty document is
// reported at line 0, column 0.
//
// MDP:
//   states s0 s1 g
//   horizon 3
//   terminal g                       (terminal states without actions get a "stay" self loop)
//   actions s0 L R
//   transition s0 L s1 1/2 0         (state action next prob reward)
//   initial s0 1
//
// Policy:
//   policy pi_L
//   kind deterministic | stochastic
//   horizon 3
//   rule * s0 L                      ('*' = every timestep, otherwise t)
//   rule 0 s1 L:1/2 R:1/2
//
// Observation model:
//   window_length 2
//   window_starts 1 2 | all
//   phi s1^L s1                      (unlisted states map to their own label)
//   observe_actions on | off
//   observe_rewards on | off
//
// Dataset:
//   dataset
//   behavior mu
//   seed 7
//   n 2
//   trajectory s0 L 0 s1 next 0 g    (state action reward ... state)

std::string serialize_mdp(const TabularMDP& mdp);
/// Throws ParseError for malformed text and ValidationError when the parsed
/// MDP breaks an invariant.
TabularMDP parse_mdp(std::string_view text);

std::string serialize_policy(const TabularMDP& mdp, const Policy& policy);
Policy parse_policy(std::string_view text, const TabularMDP& mdp);

std::string serialize_model(const TabularMDP& mdp, const ObservationModel& model);
ObservationModel parse_model(std::string_view text, const TabularMDP& mdp);

std::string serialize_dataset(const TabularMDP& mdp, const OfflineDataset& dataset);
OfflineDataset parse_dataset(std::string_view text, const TabularMDP& mdp);

/// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string content_hash(std::string_view bytes);

}  // namespace hsuff
