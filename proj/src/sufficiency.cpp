#include "hsuff/sufficiency.hpp"

#include "hsuff/eval.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace hsuff {

std::string PolicyClassSummary::describe() const {
    std::string out = std::string("deterministic ") + (stationary ? "stationary" : "nonstationary") + " policies: " +
                      std::to_string(enumerated) + " of " + total.str() + " enumerated";
    if (truncated) out += " (truncated by cap)";
    return out;
}

std::string SufficiencyVerdict::label() const {
    if (!sufficient) return "not-sufficient";
    return policy_class.truncated ? "sufficient over enumerated subset only" : "sufficient";
}

namespace {

PolicyClassSummary summarize(const PolicyEnumerator& policies) {
    return PolicyClassSummary{policies.stationary(), policies.total(), policies.enumerable(), policies.truncated()};
}

int compare(const Rational& a, const Rational& b) {
    return a < b ? -1 : (b < a ? 1 : 0);
}

}  // namespace

SufficiencyVerdict check_h_sufficiency(const TabularMDP& mdp, const ObservationModel& model,
                                       const PolicyClassOptions& options) {
    require_valid(mdp);
    validate_model(mdp, model);
    PolicyEnumerator policies(mdp, options.stationary, options.cap);
    const auto count = policies.enumerable();

    struct Entry {
        std::string canonical;
        std::size_t hash = 0;
        Rational value;
    };
    std::vector<Entry> entries(count);
    detail::for_each_index(count, options.workers, [&](std::size_t i) {
        const auto policy = policies.at(i);
        auto canonical = segment_distribution(mdp, policy, model).canonical();
        const auto hash = std::hash<std::string>{}(canonical);
        entries[i] = Entry{std::move(canonical), hash, full_return(mdp, policy)};
    });

    // Buckets are keyed by hash; a collision is resolved by full comparison of
    // the canonical text, so membership never rests on the hash alone.
    std::unordered_map<std::size_t, std::vector<std::vector<std::size_t>>> by_hash;
    for (std::size_t i = 0; i < count; ++i) {
        auto& candidates = by_hash[entries[i].hash];
        auto it = std::find_if(candidates.begin(), candidates.end(), [&](const std::vector<std::size_t>& b) {
            return entries[b.front()].canonical == entries[i].canonical;
        });
        if (it == candidates.end()) {
            candidates.push_back({i});
        } else {
            it->push_back(i);
        }
    }

    SufficiencyVerdict verdict;
    verdict.policy_class = summarize(policies);
    std::optional<std::pair<std::size_t, std::size_t>> best;
    for (const auto& [hash, candidates] : by_hash) {
        for (const auto& bucket : candidates) {
            ++verdict.buckets;
            const auto first = bucket.front();
            for (std::size_t k = 1; k < bucket.size(); ++k) {
                if (entries[bucket[k]].value != entries[first].value) {
                    const std::pair<std::size_t, std::size_t> pair{first, bucket[k]};
                    if (!best || pair < *best) best = pair;
                    break;
                }
            }
        }
    }

    if (best) {
        verdict.sufficient = false;
        Witness w;
        w.first_index = best->first;
        w.second_index = best->second;
        w.first = policies.at(best->first);
        w.second = policies.at(best->second);
        w.first_return = entries[best->first].value;
        w.second_return = entries[best->second].value;
        w.gap = w.first_return - w.second_return;
        verdict.witness = std::move(w);
    }
    return verdict;
}

bool replay_witness(const TabularMDP& mdp, const ObservationModel& model, const Witness& witness) {
    const auto a = segment_distribution(mdp, witness.first, model);
    const auto b = segment_distribution(mdp, witness.second, model);
    const auto ja = full_return(mdp, witness.first);
    const auto jb = full_return(mdp, witness.second);
    return distributions_equal(a, b) && ja == witness.first_return && jb == witness.second_return &&
           ja - jb == witness.gap && ja != jb;
}

std::string behaviour_key(const TabularMDP& mdp, const Policy& policy) {
    const auto occ = occupancy(mdp, policy);
    std::string key;
    for (int t = 0; t < mdp.horizon; ++t) {
        for (StateId s = 0; s < mdp.num_states(); ++s) {
            if (occ.rows[t][s] == 0 || mdp.is_terminal(s)) continue;
            key += std::to_string(t) + "," + std::to_string(s) + ":";
            for (const auto& [a, p] : policy.rows[t][s]) key += std::to_string(a) + "=" + to_string(p) + " ";
            key += ";";
        }
    }
    return key;
}

OrderingReport check_objective_consistency(const TabularMDP& mdp, int h, const PolicyClassOptions& options) {
    require_valid(mdp);
    if (h < 0) throw InvalidParam("truncation index must be non-negative");
    PolicyEnumerator policies(mdp, options.stationary, options.cap);
    const auto count = policies.enumerable();

    OrderingReport report;
    report.h = h;
    report.policy_class = summarize(policies);
    report.truncated_values.resize(count);
    report.full_values.resize(count);
    detail::for_each_index(count, options.workers, [&](std::size_t i) {
        const auto policy = policies.at(i);
        const auto steps = per_step_rewards(mdp, policy);
        Rational truncated = 0, full = 0;
        for (std::size_t t = 0; t < steps.size(); ++t) {
            full += steps[t];
            if (t <= static_cast<std::size_t>(h)) truncated += steps[t];
        }
        report.truncated_values[i] = truncated;
        report.full_values[i] = full;
    });
    if (count == 0) return report;

    const auto argmax = [&](const std::vector<Rational>& values) {
        const auto best = *std::max_element(values.begin(), values.end());
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < values.size(); ++i)
            if (values[i] == best) out.push_back(i);
        return out;
    };
    const auto behaviours = [&](const std::vector<std::size_t>& indices) {
        std::set<std::string> seen;
        std::vector<std::size_t> out;
        for (auto i : indices)
            if (seen.insert(behaviour_key(mdp, policies.at(i))).second) out.push_back(i);
        return out;
    };
    report.truncated_argmax = argmax(report.truncated_values);
    report.full_argmax = argmax(report.full_values);
    report.truncated_argmax_behaviours = behaviours(report.truncated_argmax);
    report.full_argmax_behaviours = behaviours(report.full_argmax);

    std::vector<std::size_t> both;
    std::set_intersection(report.truncated_argmax.begin(), report.truncated_argmax.end(), report.full_argmax.begin(),
                          report.full_argmax.end(), std::back_inserter(both));
    report.argmax_intersect = !both.empty();

    // Orderings agree on all pairs iff J is constant on each J_h tie group and
    // strictly increasing across groups; a violation is found in sorted order.
    std::vector<std::size_t> order(count);
    for (std::size_t i = 0; i < count; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return report.truncated_values[a] < report.truncated_values[b];
    });
    std::size_t group_begin = 0;
    std::optional<std::size_t> prev_group_max;  // index with largest J in the previous group
    while (group_begin < count) {
        std::size_t group_end = group_begin;
        while (group_end < count &&
               report.truncated_values[order[group_end]] == report.truncated_values[order[group_begin]])
            ++group_end;
        std::size_t lo = order[group_begin], hi = order[group_begin];
        for (std::size_t k = group_begin; k < group_end; ++k) {
            const auto i = order[k];
            if (compare(report.full_values[i], report.full_values[order[group_begin]]) != 0 &&
                !report.disagreeing_pair)
                report.disagreeing_pair = std::minmax(order[group_begin], i);
            if (report.full_values[i] < report.full_values[lo]) lo = i;
            if (report.full_values[hi] < report.full_values[i]) hi = i;
        }
        if (prev_group_max && !(report.full_values[*prev_group_max] < report.full_values[lo]) &&
            !report.disagreeing_pair)
            report.disagreeing_pair = std::minmax(*prev_group_max, lo);
        prev_group_max = hi;
        group_begin = group_end;
    }
    report.ordering_consistent = !report.disagreeing_pair.has_value();
    return report;
}

}  // namespace hsuff
