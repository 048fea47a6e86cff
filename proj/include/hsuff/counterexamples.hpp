#pragma once

#include "hsuff/mdp.hpp"
#include "hsuff/observation.hpp"
#include "hsuff/rational.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hsuff {

enum class Family { prefix, greedy, aliasing };

std::string_view family_name(Family family);
/// Throws InvalidParam on an unknown name.
Family parse_family(std::string_view name);

/// Generator parameters. `penalty` is M and only used by the greedy family,
/// which requires M > H + 1.
struct CounterexampleSpec {
    Family family = Family::prefix;
    int H = 1;
    std::optional<Rational> penalty;

    /// Throws InvalidParam when the parameters are outside the family's domain.
    void validate() const;
};

struct Counterexample {
    TabularMDP mdp;
    ObservationModel model;
};

/// Commitment chain: the choice at s0 is remembered in duplicated chain
/// states s_t^L / s_t^R that phi merges; windows start at 1. T = H + 2.
Counterexample gen_prefix(int H);

/// Greedy/patient chain over (position, G-flag) states with a -M trap at the
/// end. T = H + 3, the last step being an absorbing zero-reward pad.
Counterexample gen_greedy(int H, const Rational& penalty);

/// Two deterministic branches u/v from s0 whose states phi aliases pairwise;
/// windows start at 1. T = H + 2.
Counterexample gen_aliasing(int H);

Counterexample generate(const CounterexampleSpec& spec);

/// Aliasing model that merges u_t/v_t only for t <= H. A window starting at 1
/// still contains u_{H+1} / v_{H+1}, so the branches remain distinguishable.
ObservationModel aliasing_literal_model(const TabularMDP& mdp, int H);

/// Named reference policies of a family, e.g. {"pi_L", "pi_R"} or
/// {"all-greedy", "all-patient"}.
std::vector<Policy> reference_policies(Family family, const TabularMDP& mdp);

struct ClaimCheck {
    std::string description;
    std::string expected;
    std::string computed;
    bool pass = false;
};

struct PropositionReport {
    int proposition = 0;
    int H = 0;
    std::optional<Rational> penalty;
    std::vector<ClaimCheck> checks;
    bool pass = false;
};

/// Generates the family instance and checks every claimed exact value.
/// Proposition 2 requires `penalty`; the others ignore it.
PropositionReport verify_proposition(int proposition, int H, const std::optional<Rational>& penalty = std::nullopt);

}  // namespace hsuff
