#include "fixtures.hpp"
#include "oracle.hpp"

#include "hsuff/counterexamples.hpp"
#include "hsuff/eval.hpp"
#include "hsuff/sufficiency.hpp"

#include <doctest.h>

using namespace hsuff;

TEST_CASE("prefix H=3 is not sufficient, witnessed by (pi_L, pi_R)") {
    const auto ce = gen_prefix(3);
    const auto verdict = check_h_sufficiency(ce.mdp, ce.model);
    CHECK_FALSE(verdict.sufficient);
    CHECK(verdict.label() == "not-sufficient");
    REQUIRE(verdict.witness.has_value());
    const auto& w = *verdict.witness;
    CHECK(w.first == policy_preferring(ce.mdp, "L"));
    CHECK(w.second == policy_preferring(ce.mdp, "R"));
    CHECK(w.first_return == 1);
    CHECK(w.second_return == 0);
    CHECK(w.gap == 1);
    CHECK(replay_witness(ce.mdp, ce.model, w));
    CHECK(verdict.policy_class.total == 2);
    CHECK_FALSE(verdict.policy_class.truncated);
}

TEST_CASE("aliasing H=3 with identity phi from t=1 is sufficient") {
    const auto ce = gen_aliasing(3);
    auto model = ce.model;
    model.phi = ce.mdp.states;
    const auto verdict = check_h_sufficiency(ce.mdp, model);
    CHECK(verdict.sufficient);
    CHECK_FALSE(verdict.witness.has_value());
    CHECK(verdict.label() == "sufficient");
    // Agrees with the brute-force bucket check.
    CHECK(oracle::sufficiency(ce.mdp, model, true).sufficient);
}

TEST_CASE("single-state single-action MDP is sufficient") {
    const auto mdp = fixtures::trivial(3);
    const auto verdict = check_h_sufficiency(mdp, ObservationModel::all_windows(mdp, 1));
    CHECK(verdict.sufficient);
    CHECK(verdict.policy_class.total == 1);
}

TEST_CASE("verdict and witness match the pairwise oracle") {
    std::mt19937_64 rng(31);
    int insufficient = 0;
    for (int trial = 0; trial < 80; ++trial) {
        const auto mdp = oracle::random_mdp(rng, 5, 3);
        const auto model = oracle::random_model(rng, mdp);
        for (bool stationary : {true, false}) {
            PolicyEnumerator count(mdp, stationary, 1u << 20);
            if (count.total() > 256) continue;
            const auto verdict = check_h_sufficiency(mdp, model, {stationary, 1000, 1});
            const auto expected = oracle::sufficiency(mdp, model, stationary);
            CHECK(verdict.sufficient == expected.sufficient);
            if (!expected.sufficient) {
                ++insufficient;
                REQUIRE(verdict.witness.has_value());
                CHECK(std::make_pair(verdict.witness->first_index, verdict.witness->second_index) == *expected.witness);
                CHECK(replay_witness(mdp, model, *verdict.witness));
            }
        }
    }
    CHECK(insufficient > 0);
}

TEST_CASE("worker count does not change the result") {
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 25; ++trial) {
        const auto mdp = oracle::random_mdp(rng);
        const auto model = oracle::random_model(rng, mdp);
        const auto one = check_h_sufficiency(mdp, model, {true, 1000, 1});
        const auto many = check_h_sufficiency(mdp, model, {true, 1000, 4});
        CHECK(one.sufficient == many.sufficient);
        CHECK(one.buckets == many.buckets);
        if (one.witness) {
            REQUIRE(many.witness.has_value());
            CHECK(one.witness->first_index == many.witness->first_index);
            CHECK(one.witness->second_index == many.witness->second_index);
        }
    }
}

TEST_CASE("a cap below the class size scopes the verdict") {
    const auto ce = gen_greedy(2, 4);
    const auto verdict = check_h_sufficiency(ce.mdp, ce.model, {true, 5, 1});
    CHECK(verdict.policy_class.truncated);
    CHECK(verdict.policy_class.enumerated == 5);
    CHECK(verdict.policy_class.total == 32);
    if (verdict.sufficient) CHECK(verdict.label() == "sufficient over enumerated subset only");
    CHECK(verdict.policy_class.describe().find("truncated") != std::string::npos);
}

TEST_CASE("witnesses of a richer model are witnesses of the coarser one") {
    for (int H : {1, 2, 3}) {
        std::vector<Counterexample> cases{gen_prefix(H), gen_aliasing(H), gen_greedy(H, H + 2)};
        for (const auto& ce : cases) {
            std::vector<ObservationModel> richer;
            auto identity = ce.model;
            identity.phi = ce.mdp.states;
            richer.push_back(identity);
            auto more_starts = ce.model;
            more_starts.window_starts.clear();
            for (int t = 0; t + ce.model.window_length <= ce.mdp.horizon; ++t) more_starts.window_starts.push_back(t);
            richer.push_back(more_starts);
            for (const auto& model : richer) {
                const auto verdict = check_h_sufficiency(ce.mdp, model);
                if (!verdict.witness) continue;
                const auto& w = *verdict.witness;
                CHECK(distributions_equal(segment_distribution(ce.mdp, w.first, ce.model),
                                          segment_distribution(ce.mdp, w.second, ce.model)));
            }
        }
    }
}

TEST_CASE("verdicts are deterministic") {
    const auto ce = gen_prefix(4);
    const auto a = check_h_sufficiency(ce.mdp, ce.model);
    const auto b = check_h_sufficiency(ce.mdp, ce.model);
    REQUIRE(a.witness.has_value());
    REQUIRE(b.witness.has_value());
    CHECK(a.witness->first == b.witness->first);
    CHECK(a.witness->second == b.witness->second);
    CHECK(a.witness->gap == b.witness->gap);
}

TEST_CASE("greedy H=3 M=10: truncated and full objectives disagree") {
    const auto ce = gen_greedy(3, 10);
    const auto report = check_objective_consistency(ce.mdp, 3);
    const auto greedy_key = behaviour_key(ce.mdp, policy_preferring(ce.mdp, "greedy"));
    const auto patient_key = behaviour_key(ce.mdp, policy_preferring(ce.mdp, "patient"));
    PolicyEnumerator policies(ce.mdp, true, 1000);
    REQUIRE(report.truncated_argmax_behaviours.size() == 1);
    REQUIRE(report.full_argmax_behaviours.size() == 1);
    CHECK(behaviour_key(ce.mdp, policies.at(report.truncated_argmax_behaviours[0])) == greedy_key);
    CHECK(behaviour_key(ce.mdp, policies.at(report.full_argmax_behaviours[0])) == patient_key);
    CHECK(report.truncated_values[report.truncated_argmax[0]] == 4);
    CHECK(report.full_values[report.full_argmax[0]] == 0);
    CHECK_FALSE(report.argmax_intersect);
    CHECK_FALSE(report.ordering_consistent);
    REQUIRE(report.disagreeing_pair.has_value());
}

TEST_CASE("h >= T-1 gives identical orderings") {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 20; ++trial) {
        const auto mdp = oracle::random_mdp(rng);
        const auto report = check_objective_consistency(mdp, mdp.horizon - 1);
        CHECK(report.ordering_consistent);
        CHECK(report.argmax_intersect);
        CHECK(report.truncated_argmax == report.full_argmax);
    }
}

TEST_CASE("zero rewards make every policy tie") {
    auto mdp = gen_prefix(3).mdp;
    for (auto& per_state : mdp.transitions)
        for (auto& per_action : per_state)
            for (auto& tr : per_action) tr.reward = 0;
    const auto report = check_objective_consistency(mdp, 1);
    CHECK(report.ordering_consistent);
    CHECK(report.truncated_argmax.size() == 2);
    CHECK(report.full_argmax.size() == 2);
}

TEST_CASE("ordering agreement matches a pairwise sign comparison") {
    std::mt19937_64 rng(34);
    const auto sign = [](const Rational& x) { return x < 0 ? -1 : (x > 0 ? 1 : 0); };
    for (int trial = 0; trial < 60; ++trial) {
        const auto mdp = oracle::random_mdp(rng);
        const int h = static_cast<int>(oracle::below(rng, static_cast<std::uint64_t>(mdp.horizon)));
        const auto report = check_objective_consistency(mdp, h);
        const auto policies = oracle::deterministic_policies(mdp, true);
        bool consistent = true;
        for (std::size_t i = 0; i < policies.size(); ++i)
            for (std::size_t j = i + 1; j < policies.size(); ++j) {
                const auto dh = oracle::expected_return(mdp, policies[i], h) - oracle::expected_return(mdp, policies[j], h);
                const auto df = oracle::expected_return(mdp, policies[i]) - oracle::expected_return(mdp, policies[j]);
                consistent = consistent && sign(dh) == sign(df);
            }
        CHECK(report.ordering_consistent == consistent);
        if (report.disagreeing_pair) {
            const auto [a, b] = *report.disagreeing_pair;
            CHECK(sign(report.truncated_values[a] - report.truncated_values[b]) !=
                  sign(report.full_values[a] - report.full_values[b]));
        }
    }
}
