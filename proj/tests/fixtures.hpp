#pragma once

#include "hsuff/mdp.hpp"

namespace fixtures {

/// s0 -> s1 -> ... deterministic chain with one action per state and reward
/// t+1 on step t.
inline hsuff::TabularMDP single_path(int horizon) {
    hsuff::TabularMDP mdp;
    mdp.horizon = horizon;
    for (int t = 0; t <= horizon; ++t) mdp.add_state("c" + std::to_string(t));
    for (int t = 0; t < horizon; ++t) {
        const auto a = mdp.add_action(t, "go");
        mdp.add_transition(t, a, t + 1, 1, t + 1);
    }
    mdp.make_absorbing(horizon);
    mdp.initial[0] = 1;
    return mdp;
}

/// Two states, one action, stay with probability p, switch with 1 - p.
inline hsuff::TabularMDP two_state(const hsuff::Rational& p, int horizon) {
    hsuff::TabularMDP mdp;
    mdp.horizon = horizon;
    const auto a = mdp.add_state("a");
    const auto b = mdp.add_state("b");
    for (auto s : {a, b}) {
        const auto go = mdp.add_action(s, "go");
        mdp.add_transition(s, go, s, p, 0);
        mdp.add_transition(s, go, s == a ? b : a, 1 - p, 1);
    }
    mdp.initial[a] = 1;
    return mdp;
}

/// One state, one action.
inline hsuff::TabularMDP trivial(int horizon) {
    hsuff::TabularMDP mdp;
    mdp.horizon = horizon;
    const auto s = mdp.add_state("only");
    mdp.add_transition(s, mdp.add_action(s, "wait"), s, 1, 1);
    mdp.initial[s] = 1;
    return mdp;
}

}  // namespace fixtures
