#pragma once

#include "hsuff/errors.hpp"
#include "hsuff/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hsuff {

using StateId = std::size_t;
using ActionId = std::size_t;

/// One outcome of taking an action: reward is r(s, a, s').
struct Transition {
    StateId next = 0;
    Rational prob;
    Rational reward;

    bool operator==(const Transition&) const = default;
};

/**
 * Finite-horizon tabular MDP over exact rationals.
 *
 * States and actions are opaque labels; their position in the vectors is the
 * canonical id. Action sets are state dependent. Terminal states are
 * absorbing padding: one action, self loop, reward 0.
 */
struct TabularMDP {
    std::vector<std::string> states;
    std::vector<std::vector<std::string>> actions;              // [state][action]
    std::vector<std::vector<std::vector<Transition>>> transitions;  // [state][action]
    int horizon = 0;
    std::vector<Rational> initial;  // [state]
    std::vector<bool> terminal;     // [state]

    std::size_t num_states() const { return states.size(); }
    std::size_t num_actions(StateId s) const { return actions[s].size(); }
    bool is_terminal(StateId s) const { return s < terminal.size() && terminal[s]; }

    std::optional<StateId> find_state(std::string_view label) const;
    std::optional<ActionId> find_action(StateId s, std::string_view label) const;

    /// Adds a state with no actions yet and returns its id.
    StateId add_state(std::string label, bool is_terminal = false);
    ActionId add_action(StateId s, std::string label);
    void add_transition(StateId s, ActionId a, StateId next, Rational prob, Rational reward);
    /// Makes `s` a terminal: single "stay" self loop with reward 0.
    void make_absorbing(StateId s);

    bool operator==(const TabularMDP&) const = default;
};

/// Returns every invariant violation, naming the offending (state, action).
/// Empty iff the MDP is valid.
std::vector<std::string> validate_mdp(const TabularMDP& mdp);

/// Throws ValidationError when validate_mdp reports anything.
void require_valid(const TabularMDP& mdp);

enum class PolicyKind { deterministic, stochastic };

using ActionDistribution = std::vector<std::pair<ActionId, Rational>>;

/**
 * Time-indexed policy: rows[t][s] is the action distribution at step t in
 * state s, for t in [0, horizon). An empty cell means "undefined"; it is
 * only legal for terminal states or (t, s) pairs the policy never reaches.
 */
struct Policy {
    PolicyKind kind = PolicyKind::deterministic;
    int horizon = 0;
    std::vector<std::vector<ActionDistribution>> rows;
    std::string name;

    const ActionDistribution& at(int t, StateId s) const { return rows[t][s]; }

    bool operator==(const Policy& other) const { return kind == other.kind && horizon == other.horizon && rows == other.rows; }
};

/// Checks shape, action support and normalisation of every defined cell.
/// Reachability of undefined cells is checked during evaluation.
void validate_policy(const TabularMDP& mdp, const Policy& policy);

/// Distribution used at (t, s). Terminal states with no entry fall back to
/// their single action. Throws PolicyMismatch for a reachable undefined cell.
const ActionDistribution& action_distribution(const TabularMDP& mdp, const Policy& policy, int t, StateId s);

/// Stationary deterministic policy choosing `action_label` wherever the state
/// offers it and the first action elsewhere.
Policy policy_preferring(const TabularMDP& mdp, std::string_view action_label);

/// Compact "state=action" listing of a deterministic policy's choices at
/// states with more than one action. Stationary policies list each state once.
std::string describe_choices(const TabularMDP& mdp, const Policy& policy);

/**
 * Lexicographic enumerator of deterministic policies.
 *
 * Cells are the non-terminal states (stationary) or the (t, state) pairs in
 * t-major order (nonstationary); the first cell is the most significant
 * digit. Policy k is reachable directly with `at(k)`, so index ranges can be
 * handed to separate workers.
 */
class PolicyEnumerator {
public:
    PolicyEnumerator(const TabularMDP& mdp, bool stationary, std::size_t cap);

    /// Number of policies in the full class, independent of the cap.
    const BigInt& total() const { return total_; }
    /// Policies actually produced: min(total, cap).
    std::size_t enumerable() const { return enumerable_; }
    bool truncated() const { return truncated_; }
    bool stationary() const { return stationary_; }

    /// Policy with lexicographic index `index`; index must be < enumerable().
    Policy at(std::size_t index) const;

    /// Lazy iteration: returns the next policy, std::nullopt when the class
    /// is exhausted, and throws CapExceeded once `cap` policies have been
    /// produced while more remain.
    std::optional<Policy> next();

private:
    const TabularMDP* mdp_;
    bool stationary_;
    std::size_t cap_;
    std::vector<std::pair<int, StateId>> cells_;  // (t or -1, state)
    std::vector<std::size_t> radix_;
    BigInt total_;
    std::size_t enumerable_ = 0;
    bool truncated_ = false;
    std::size_t cursor_ = 0;
};

}  // namespace hsuff
