#pragma once

#include "hsuff/mdp.hpp"
#include "hsuff/rational.hpp"

#include <vector>

namespace hsuff {

/// rows[t][s] = P(s_t = s) for t in [0, T].
struct OccupancyTable {
    std::vector<std::vector<Rational>> rows;
};

/// Forward recursion of the state marginals under `policy`.
OccupancyTable occupancy(const TabularMDP& mdp, const Policy& policy);

/// Expected episode return E[sum_{t=0}^{T-1} r_t].
Rational full_return(const TabularMDP& mdp, const Policy& policy);

/// Expected sum of rewards r_0 .. r_h, i.e. min(h + 1, T) terms. `h` is the
/// inclusive upper index; h >= T - 1 gives full_return.
Rational truncated_return(const TabularMDP& mdp, const Policy& policy, int h);

/// Expected reward collected at step t alone, for every t in [0, T).
std::vector<Rational> per_step_rewards(const TabularMDP& mdp, const Policy& policy);

}  // namespace hsuff
