#include "hsuff/mdp.hpp"

#include <algorithm>
#include <set>

namespace hsuff {

std::optional<StateId> TabularMDP::find_state(std::string_view label) const {
    const auto it = std::find(states.begin(), states.end(), label);
    if (it == states.end()) return std::nullopt;
    return static_cast<StateId>(it - states.begin());
}

std::optional<ActionId> TabularMDP::find_action(StateId s, std::string_view label) const {
    if (s >= actions.size()) return std::nullopt;
    const auto& list = actions[s];
    const auto it = std::find(list.begin(), list.end(), label);
    if (it == list.end()) return std::nullopt;
    return static_cast<ActionId>(it - list.begin());
}

StateId TabularMDP::add_state(std::string label, bool is_terminal) {
    states.push_back(std::move(label));
    actions.emplace_back();
    transitions.emplace_back();
    initial.emplace_back(0);
    terminal.push_back(false);
    const StateId id = states.size() - 1;
    if (is_terminal) make_absorbing(id);
    return id;
}

ActionId TabularMDP::add_action(StateId s, std::string label) {
    actions[s].push_back(std::move(label));
    transitions[s].emplace_back();
    return actions[s].size() - 1;
}

void TabularMDP::add_transition(StateId s, ActionId a, StateId next, Rational prob, Rational reward) {
    transitions[s][a].push_back(Transition{next, std::move(prob), std::move(reward)});
}

void TabularMDP::make_absorbing(StateId s) {
    terminal[s] = true;
    actions[s] = {"stay"};
    transitions[s] = {{Transition{s, Rational(1), Rational(0)}}};
}

namespace {

std::string pair_name(const TabularMDP& mdp, StateId s, ActionId a) {
    return "(" + mdp.states[s] + ", " + mdp.actions[s][a] + ")";
}

}  // namespace

std::vector<std::string> validate_mdp(const TabularMDP& mdp) {
    std::vector<std::string> out;
    const auto n = mdp.states.size();
    if (n == 0) out.emplace_back("MDP has no states");
    if (mdp.horizon < 1) out.push_back("horizon must be positive, got " + std::to_string(mdp.horizon));
    if (mdp.actions.size() != n || mdp.transitions.size() != n || mdp.initial.size() != n ||
        mdp.terminal.size() != n) {
        out.emplace_back("per-state tables do not match the number of states");
        return out;
    }

    std::set<std::string_view> seen;
    for (const auto& label : mdp.states)
        if (!seen.insert(label).second) out.push_back("duplicate state label '" + label + "'");

    for (StateId s = 0; s < n; ++s) {
        const auto& acts = mdp.actions[s];
        if (acts.empty()) {
            out.push_back("state " + mdp.states[s] + " has no actions");
            continue;
        }
        if (mdp.transitions[s].size() != acts.size()) {
            out.push_back("state " + mdp.states[s] + ": transition table does not match its actions");
            continue;
        }
        std::set<std::string_view> seen_actions;
        for (ActionId a = 0; a < acts.size(); ++a) {
            if (!seen_actions.insert(acts[a]).second)
                out.push_back("duplicate action " + pair_name(mdp, s, a));
            Rational total = 0;
            bool ok = true;
            for (const auto& tr : mdp.transitions[s][a]) {
                if (tr.next >= n) {
                    out.push_back(pair_name(mdp, s, a) + ": next state index " + std::to_string(tr.next) +
                                  " out of range");
                    ok = false;
                }
                if (tr.prob < 0) {
                    out.push_back(pair_name(mdp, s, a) + ": negative probability " + to_string(tr.prob));
                    ok = false;
                }
                total += tr.prob;
            }
            if (ok && total != 1)
                out.push_back(pair_name(mdp, s, a) + ": probabilities sum to " + to_string(total) + ", not 1");
        }
        if (mdp.terminal[s]) {
            const bool self_loop = acts.size() == 1 && mdp.transitions[s][0].size() == 1 &&
                                   mdp.transitions[s][0][0].next == s && mdp.transitions[s][0][0].prob == 1 &&
                                   mdp.transitions[s][0][0].reward == 0;
            if (!self_loop)
                out.push_back("terminal state " + mdp.states[s] +
                              " must have exactly one action that self-loops with reward 0");
        }
    }

    Rational initial_total = 0;
    for (StateId s = 0; s < n; ++s) {
        if (mdp.initial[s] < 0) out.push_back("initial probability of " + mdp.states[s] + " is negative");
        initial_total += mdp.initial[s];
    }
    if (n > 0 && initial_total != 1)
        out.push_back("initial distribution sums to " + to_string(initial_total) + ", not 1");
    return out;
}

void require_valid(const TabularMDP& mdp) {
    auto violations = validate_mdp(mdp);
    if (!violations.empty()) throw ValidationError(std::move(violations));
}

void validate_policy(const TabularMDP& mdp, const Policy& policy) {
    if (policy.horizon != mdp.horizon)
        throw PolicyMismatch("policy horizon " + std::to_string(policy.horizon) + " does not match MDP horizon " +
                             std::to_string(mdp.horizon));
    if (policy.rows.size() != static_cast<std::size_t>(mdp.horizon))
        throw PolicyMismatch("policy has " + std::to_string(policy.rows.size()) + " rows, expected " +
                             std::to_string(mdp.horizon));
    for (int t = 0; t < mdp.horizon; ++t) {
        const auto& row = policy.rows[t];
        if (row.size() != mdp.num_states())
            throw PolicyMismatch("policy row " + std::to_string(t) + " does not cover every state");
        for (StateId s = 0; s < row.size(); ++s) {
            const auto& cell = row[s];
            if (cell.empty()) continue;
            Rational total = 0;
            for (const auto& [a, p] : cell) {
                if (a >= mdp.num_actions(s))
                    throw PolicyMismatch("policy uses an unavailable action in state " + mdp.states[s] +
                                         " at t=" + std::to_string(t));
                if (p < 0)
                    throw PolicyMismatch("negative action probability in state " + mdp.states[s] +
                                         " at t=" + std::to_string(t));
                total += p;
            }
            if (total != 1)
                throw PolicyMismatch("action distribution in state " + mdp.states[s] + " at t=" +
                                     std::to_string(t) + " sums to " + to_string(total));
            if (policy.kind == PolicyKind::deterministic && cell.size() != 1)
                throw PolicyMismatch("deterministic policy has a mixed cell in state " + mdp.states[s]);
        }
    }
}

const ActionDistribution& action_distribution(const TabularMDP& mdp, const Policy& policy, int t, StateId s) {
    static const ActionDistribution stay{{0, Rational(1)}};
    const auto& cell = policy.rows[t][s];
    if (!cell.empty()) return cell;
    if (mdp.is_terminal(s)) return stay;
    throw PolicyMismatch("policy is undefined in reachable state " + mdp.states[s] + " at t=" + std::to_string(t));
}

Policy policy_preferring(const TabularMDP& mdp, std::string_view action_label) {
    Policy policy;
    policy.kind = PolicyKind::deterministic;
    policy.horizon = mdp.horizon;
    policy.name = "prefer-" + std::string(action_label);
    std::vector<ActionDistribution> row(mdp.num_states());
    for (StateId s = 0; s < mdp.num_states(); ++s) {
        if (mdp.is_terminal(s)) continue;
        const ActionId a = mdp.find_action(s, action_label).value_or(0);
        row[s] = {{a, Rational(1)}};
    }
    policy.rows.assign(static_cast<std::size_t>(mdp.horizon), row);
    return policy;
}

std::string describe_choices(const TabularMDP& mdp, const Policy& policy) {
    const bool stationary = std::all_of(policy.rows.begin(), policy.rows.end(),
                                        [&](const auto& row) { return row == policy.rows.front(); });
    std::string out;
    const auto append_row = [&](const std::vector<ActionDistribution>& row, std::string_view prefix) {
        for (StateId s = 0; s < row.size(); ++s) {
            if (mdp.num_actions(s) < 2 || row[s].size() != 1) continue;
            if (!out.empty()) out += ",";
            out += std::string(prefix) + mdp.states[s] + "=" + mdp.actions[s][row[s].front().first];
        }
    };
    if (stationary && !policy.rows.empty()) {
        append_row(policy.rows.front(), "");
    } else {
        for (std::size_t t = 0; t < policy.rows.size(); ++t)
            append_row(policy.rows[t], "t" + std::to_string(t) + ":");
    }
    return out;
}

PolicyEnumerator::PolicyEnumerator(const TabularMDP& mdp, bool stationary, std::size_t cap)
    : mdp_(&mdp), stationary_(stationary), cap_(cap), total_(1) {
    if (cap == 0) throw InvalidParam("enumeration cap must be positive");
    const int layers = stationary ? 1 : mdp.horizon;
    for (int t = 0; t < layers; ++t) {
        for (StateId s = 0; s < mdp.num_states(); ++s) {
            if (mdp.is_terminal(s)) continue;
            cells_.emplace_back(stationary ? -1 : t, s);
            radix_.push_back(mdp.num_actions(s));
            total_ *= mdp.num_actions(s);
        }
    }
    truncated_ = total_ > cap_;
    enumerable_ = truncated_ ? cap_ : static_cast<std::size_t>(total_);
}

Policy PolicyEnumerator::at(std::size_t index) const {
    Policy policy;
    policy.kind = PolicyKind::deterministic;
    policy.horizon = mdp_->horizon;
    policy.name = std::string(stationary_ ? "det-stationary#" : "det-nonstationary#") + std::to_string(index);
    policy.rows.assign(static_cast<std::size_t>(mdp_->horizon), std::vector<ActionDistribution>(mdp_->num_states()));

    // Least significant digit is the last cell.
    std::size_t rest = index;
    for (std::size_t c = cells_.size(); c-- > 0;) {
        const ActionId a = rest % radix_[c];
        rest /= radix_[c];
        const auto [t, s] = cells_[c];
        if (t < 0) {
            for (auto& row : policy.rows) row[s] = {{a, Rational(1)}};
        } else {
            policy.rows[t][s] = {{a, Rational(1)}};
        }
    }
    return policy;
}

std::optional<Policy> PolicyEnumerator::next() {
    if (cursor_ >= enumerable_) {
        if (truncated_) throw CapExceeded(total_, cap_);
        return std::nullopt;
    }
    return at(cursor_++);
}

}  // namespace hsuff
