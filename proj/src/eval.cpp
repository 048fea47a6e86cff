#include "hsuff/eval.hpp"

#include <algorithm>

namespace hsuff {

namespace {

struct ForwardPass {
    OccupancyTable table;
    std::vector<Rational> step_reward;
};

ForwardPass forward(const TabularMDP& mdp, const Policy& policy) {
    validate_policy(mdp, policy);
    const auto n = mdp.num_states();
    if (mdp.initial.size() != n) throw PolicyMismatch("MDP initial distribution is malformed");

    ForwardPass pass;
    pass.table.rows.reserve(static_cast<std::size_t>(mdp.horizon) + 1);
    pass.table.rows.push_back(mdp.initial);
    pass.step_reward.assign(static_cast<std::size_t>(mdp.horizon), Rational(0));

    for (int t = 0; t < mdp.horizon; ++t) {
        const auto& row = pass.table.rows.back();
        std::vector<Rational> next(n, Rational(0));
        Rational reward = 0;
        for (StateId s = 0; s < n; ++s) {
            if (row[s] == 0) continue;
            for (const auto& [a, pa] : action_distribution(mdp, policy, t, s)) {
                if (pa == 0) continue;
                const Rational mass = row[s] * pa;
                for (const auto& tr : mdp.transitions[s][a]) {
                    next[tr.next] += mass * tr.prob;
                    reward += mass * tr.prob * tr.reward;
                }
            }
        }
        pass.step_reward[t] = reward;
        pass.table.rows.push_back(std::move(next));
    }
    return pass;
}

}  // namespace

OccupancyTable occupancy(const TabularMDP& mdp, const Policy& policy) {
    return forward(mdp, policy).table;
}

std::vector<Rational> per_step_rewards(const TabularMDP& mdp, const Policy& policy) {
    return forward(mdp, policy).step_reward;
}

Rational full_return(const TabularMDP& mdp, const Policy& policy) {
    Rational total = 0;
    for (const auto& r : per_step_rewards(mdp, policy)) total += r;
    return total;
}

Rational truncated_return(const TabularMDP& mdp, const Policy& policy, int h) {
    if (h < 0) throw InvalidParam("truncation index must be non-negative");
    const auto steps = per_step_rewards(mdp, policy);
    const auto terms = std::min<std::size_t>(static_cast<std::size_t>(h) + 1, steps.size());
    Rational total = 0;
    for (std::size_t t = 0; t < terms; ++t) total += steps[t];
    return total;
}

}  // namespace hsuff
