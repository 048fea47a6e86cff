#include "hsuff/counterexamples.hpp"

#include "hsuff/eval.hpp"
#include "hsuff/sufficiency.hpp"

#include <algorithm>
#include <array>
#include <tuple>

namespace hsuff {

std::string_view family_name(Family family) {
    switch (family) {
        case Family::prefix: return "prefix";
        case Family::greedy: return "greedy";
        case Family::aliasing: return "aliasing";
    }
    return "?";
}

Family parse_family(std::string_view name) {
    if (name == "prefix") return Family::prefix;
    if (name == "greedy") return Family::greedy;
    if (name == "aliasing") return Family::aliasing;
    throw InvalidParam("unknown family '" + std::string(name) + "' (expected prefix, greedy or aliasing)");
}

void CounterexampleSpec::validate() const {
    if (H < 1) throw InvalidParam("H must be at least 1, got " + std::to_string(H));
    if (family != Family::greedy) return;
    if (!penalty) throw InvalidParam("greedy family needs a penalty M with M > H+1");
    if (*penalty <= H + 1)
        throw InvalidParam("greedy family requires M > H+1, got M=" + to_string(*penalty) +
                           " and H+1=" + std::to_string(H + 1));
}

namespace {

std::string indexed(std::string_view stem, int t) {
    return std::string(stem) + std::to_string(t);
}

ObservationModel window_model(const TabularMDP& mdp, int H, std::vector<int> starts) {
    ObservationModel model;
    model.window_length = H;
    model.window_starts = std::move(starts);
    model.phi = mdp.states;
    return model;
}

}  // namespace

Counterexample gen_prefix(int H) {
    CounterexampleSpec{Family::prefix, H, std::nullopt}.validate();
    TabularMDP mdp;
    mdp.horizon = H + 2;
    const StateId s0 = mdp.add_state("s0");
    std::vector<StateId> left, right;
    for (int t = 1; t <= H + 1; ++t) left.push_back(mdp.add_state(indexed("s", t) + "^L"));
    for (int t = 1; t <= H + 1; ++t) right.push_back(mdp.add_state(indexed("s", t) + "^R"));
    const StateId g = mdp.add_state("g", true);
    const StateId b = mdp.add_state("b", true);
    mdp.initial[s0] = 1;

    const ActionId L = mdp.add_action(s0, "L");
    const ActionId R = mdp.add_action(s0, "R");
    mdp.add_transition(s0, L, left.front(), 1, 0);
    mdp.add_transition(s0, R, right.front(), 1, 0);
    for (const auto& [chain, terminal, reward] :
         {std::tuple{left, g, Rational(1)}, std::tuple{right, b, Rational(0)}}) {
        for (std::size_t k = 0; k < chain.size(); ++k) {
            const ActionId next = mdp.add_action(chain[k], "next");
            if (k + 1 < chain.size())
                mdp.add_transition(chain[k], next, chain[k + 1], 1, 0);
            else
                mdp.add_transition(chain[k], next, terminal, 1, reward);
        }
    }

    auto model = window_model(mdp, H, {1});
    for (std::size_t k = 0; k < left.size(); ++k) {
        model.phi[left[k]] = indexed("s", static_cast<int>(k) + 1);
        model.phi[right[k]] = indexed("s", static_cast<int>(k) + 1);
    }
    return {std::move(mdp), std::move(model)};
}

Counterexample gen_greedy(int H, const Rational& penalty) {
    CounterexampleSpec{Family::greedy, H, penalty}.validate();
    TabularMDP mdp;
    mdp.horizon = H + 3;
    // position[t][G]; position 0 exists only with G = 0.
    std::vector<std::array<StateId, 2>> position(static_cast<std::size_t>(H) + 2);
    position[0][0] = position[0][1] = mdp.add_state("s0");
    for (int t = 1; t <= H + 1; ++t) {
        position[t][0] = mdp.add_state(indexed("s", t) + "^G0");
        position[t][1] = mdp.add_state(indexed("s", t) + "^G1");
    }
    const StateId trap = mdp.add_state("trap", true);
    const StateId safe = mdp.add_state("safe", true);
    mdp.initial[position[0][0]] = 1;

    for (int t = 0; t <= H; ++t) {
        for (int flag : {0, 1}) {
            if (t == 0 && flag == 1) continue;
            const StateId s = position[t][flag];
            const ActionId greedy = mdp.add_action(s, "greedy");
            const ActionId patient = mdp.add_action(s, "patient");
            mdp.add_transition(s, greedy, position[t + 1][1], 1, 1);
            mdp.add_transition(s, patient, position[t + 1][flag], 1, 0);
        }
    }
    const StateId last_clean = position[H + 1][0];
    const StateId last_flagged = position[H + 1][1];
    mdp.add_transition(last_clean, mdp.add_action(last_clean, "end"), safe, 1, 0);
    mdp.add_transition(last_flagged, mdp.add_action(last_flagged, "end"), trap, 1, -penalty);

    auto model = ObservationModel::all_windows(mdp, H);
    return {std::move(mdp), std::move(model)};
}

Counterexample gen_aliasing(int H) {
    CounterexampleSpec{Family::aliasing, H, std::nullopt}.validate();
    TabularMDP mdp;
    mdp.horizon = H + 2;
    const StateId s0 = mdp.add_state("s0");
    std::vector<StateId> u, v;
    for (int t = 1; t <= H + 1; ++t) u.push_back(mdp.add_state(indexed("u", t)));
    for (int t = 1; t <= H + 1; ++t) v.push_back(mdp.add_state(indexed("v", t)));
    const StateId g = mdp.add_state("g", true);
    const StateId b = mdp.add_state("b", true);
    mdp.initial[s0] = 1;

    mdp.add_transition(s0, mdp.add_action(s0, "L"), u.front(), 1, 0);
    mdp.add_transition(s0, mdp.add_action(s0, "R"), v.front(), 1, 0);
    for (const auto& [chain, terminal, reward] : {std::tuple{u, g, Rational(1)}, std::tuple{v, b, Rational(0)}}) {
        for (std::size_t k = 0; k < chain.size(); ++k) {
            const ActionId next = mdp.add_action(chain[k], "next");
            mdp.add_transition(chain[k], next, k + 1 < chain.size() ? chain[k + 1] : terminal, 1,
                               k + 1 < chain.size() ? Rational(0) : reward);
        }
    }

    // A window from t = 1 spans u_1 .. u_{H+1}, so the shared feature space
    // has to cover index H + 1 as well for the branches to coincide.
    auto model = window_model(mdp, H, {1});
    for (std::size_t k = 0; k < u.size(); ++k) {
        model.phi[u[k]] = indexed("w", static_cast<int>(k) + 1);
        model.phi[v[k]] = indexed("w", static_cast<int>(k) + 1);
    }
    return {std::move(mdp), std::move(model)};
}

ObservationModel aliasing_literal_model(const TabularMDP& mdp, int H) {
    auto model = window_model(mdp, H, {1});
    for (int t = 1; t <= H; ++t) {
        const auto u = mdp.find_state(indexed("u", t));
        const auto v = mdp.find_state(indexed("v", t));
        if (!u || !v) throw InvalidParam("MDP is not an aliasing instance for H=" + std::to_string(H));
        model.phi[*u] = model.phi[*v] = indexed("w", t);
    }
    return model;
}

Counterexample generate(const CounterexampleSpec& spec) {
    spec.validate();
    switch (spec.family) {
        case Family::prefix: return gen_prefix(spec.H);
        case Family::greedy: return gen_greedy(spec.H, *spec.penalty);
        case Family::aliasing: return gen_aliasing(spec.H);
    }
    throw InvalidParam("unknown family");
}

std::vector<Policy> reference_policies(Family family, const TabularMDP& mdp) {
    const auto named = [&](std::string_view action, std::string name) {
        auto policy = policy_preferring(mdp, action);
        policy.name = std::move(name);
        return policy;
    };
    if (family == Family::greedy) return {named("greedy", "all-greedy"), named("patient", "all-patient")};
    return {named("L", "pi_L"), named("R", "pi_R")};
}

namespace {

class ReportBuilder {
public:
    explicit ReportBuilder(PropositionReport& report) : report_(report) {}

    void expect(std::string description, std::string expected, std::string computed) {
        const bool pass = expected == computed;
        report_.checks.push_back({std::move(description), std::move(expected), std::move(computed), pass});
    }
    void expect(std::string description, const Rational& expected, const Rational& computed) {
        expect(std::move(description), to_string(expected), to_string(computed));
    }
    void expect(std::string description, bool expected, bool computed) {
        expect(std::move(description), std::string(expected ? "true" : "false"),
               std::string(computed ? "true" : "false"));
    }

private:
    PropositionReport& report_;
};

bool sums_to_one(const SegmentDistribution& dist) {
    return std::all_of(dist.per_start.begin(), dist.per_start.end(), [](const auto& entry) {
        Rational total = 0;
        for (const auto& [key, mass] : entry.second) total += mass.prob;
        return total == 1;
    });
}

std::string name_of(const Policy& candidate, const std::vector<Policy>& named) {
    for (const auto& p : named)
        if (p == candidate) return p.name;
    return candidate.name;
}

/// Shared claims of the two indistinguishability propositions.
void check_indistinguishable(ReportBuilder& out, const Counterexample& ce, const std::vector<Policy>& refs,
                             const PolicyClassOptions& options) {
    const auto& [pi_l, pi_r] = std::tie(refs[0], refs[1]);
    const auto dl = segment_distribution(ce.mdp, pi_l, ce.model);
    const auto dr = segment_distribution(ce.mdp, pi_r, ce.model);
    out.expect("segment distributions under pi_L and pi_R are equal", true, distributions_equal(dl, dr));
    out.expect("every per-start distribution sums to 1", true, sums_to_one(dl) && sums_to_one(dr));
    out.expect("J(pi_L)", Rational(1), full_return(ce.mdp, pi_l));
    out.expect("J(pi_R)", Rational(0), full_return(ce.mdp, pi_r));

    const auto verdict = check_h_sufficiency(ce.mdp, ce.model, options);
    out.expect("H-sufficiency verdict", std::string("not-sufficient"), verdict.label());
    std::string witness = "none";
    bool replays = false;
    if (verdict.witness) {
        witness = name_of(verdict.witness->first, refs) + " vs " + name_of(verdict.witness->second, refs);
        replays = replay_witness(ce.mdp, ce.model, *verdict.witness);
    }
    out.expect("witness pair", std::string("pi_L vs pi_R"), witness);
    out.expect("witness replays exactly", true, replays);
}

}  // namespace

PropositionReport verify_proposition(int proposition, int H, const std::optional<Rational>& penalty) {
    if (proposition < 1 || proposition > 3)
        throw InvalidParam("proposition must be 1, 2 or 3, got " + std::to_string(proposition));
    const Family family = proposition == 1 ? Family::prefix : proposition == 2 ? Family::greedy : Family::aliasing;
    const CounterexampleSpec spec{family, H, proposition == 2 ? penalty : std::nullopt};
    const auto ce = generate(spec);
    const auto refs = reference_policies(family, ce.mdp);
    const PolicyClassOptions options{};

    PropositionReport report;
    report.proposition = proposition;
    report.H = H;
    report.penalty = spec.penalty;
    ReportBuilder out(report);
    out.expect("generated MDP validates", std::string(""), [&] {
        std::string joined;
        for (const auto& v : validate_mdp(ce.mdp)) joined += v + ";";
        return joined;
    }());

    if (family == Family::prefix) {
        check_indistinguishable(out, ce, refs, options);
        // Control: once the window covers t = 0 with actions visible, the
        // initial choice is observed directly.
        auto control = ce.model;
        control.window_starts = {0, 1};
        control.observe_actions = true;
        out.expect("control: windows from t=0 with actions observed are sufficient", std::string("sufficient"),
                   check_h_sufficiency(ce.mdp, control, options).label());
    } else if (family == Family::aliasing) {
        check_indistinguishable(out, ce, refs, options);
        auto control = ce.model;
        control.phi = ce.mdp.states;
        out.expect("control: identity phi with windows from t=1 is sufficient", std::string("sufficient"),
                   check_h_sufficiency(ce.mdp, control, options).label());
    } else {
        const Rational& M = *spec.penalty;
        const auto& greedy = refs[0];
        const auto& patient = refs[1];
        const auto j_greedy = full_return(ce.mdp, greedy);
        const auto j_patient = full_return(ce.mdp, patient);
        out.expect("J_H(all-greedy) with h=H", Rational(H + 1), truncated_return(ce.mdp, greedy, H));
        out.expect("J(all-greedy) = (H+1) - M", Rational(H + 1) - M, j_greedy);
        out.expect("J(all-patient)", Rational(0), j_patient);
        out.expect("gap J(all-patient) - J(all-greedy) = M - (H+1)", M - (H + 1), j_patient - j_greedy);
        out.expect("J(all-greedy) < 0", true, j_greedy < 0);

        const auto ordering = check_objective_consistency(ce.mdp, H, options);
        const auto label_behaviours = [&](const std::vector<std::size_t>& reps) {
            PolicyEnumerator policies(ce.mdp, options.stationary, options.cap);
            const auto greedy_key = behaviour_key(ce.mdp, greedy);
            const auto patient_key = behaviour_key(ce.mdp, patient);
            std::string out_text;
            for (auto i : reps) {
                const auto key = behaviour_key(ce.mdp, policies.at(i));
                const auto name = key == greedy_key    ? std::string("all-greedy")
                                  : key == patient_key ? std::string("all-patient")
                                                       : policies.at(i).name;
                out_text += (out_text.empty() ? "" : ",") + name;
            }
            return "{" + out_text + "}";
        };
        out.expect("J_H argmax (by behaviour)", std::string("{all-greedy}"),
                   label_behaviours(ordering.truncated_argmax_behaviours));
        out.expect("J argmax (by behaviour)", std::string("{all-patient}"),
                   label_behaviours(ordering.full_argmax_behaviours));
        out.expect("max J_H over the class", Rational(H + 1), ordering.truncated_values[ordering.truncated_argmax.front()]);
        out.expect("max J over the class", Rational(0), ordering.full_values[ordering.full_argmax.front()]);
        out.expect("argmax sets intersect", false, ordering.argmax_intersect);
        out.expect("J_H ordering equals J ordering", false, ordering.ordering_consistent);
    }

    report.pass = std::all_of(report.checks.begin(), report.checks.end(), [](const ClaimCheck& c) { return c.pass; });
    return report;
}

}  // namespace hsuff
