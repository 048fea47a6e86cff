#include "hsuff/observation.hpp"

#include "hsuff/eval.hpp"

#include <algorithm>
#include <set>
#include <utility>

namespace hsuff {

ObservationModel ObservationModel::all_windows(const TabularMDP& mdp, int window_length) {
    ObservationModel model;
    model.window_length = window_length;
    for (int t = 0; t + window_length <= mdp.horizon; ++t) model.window_starts.push_back(t);
    model.phi = mdp.states;
    return model;
}

void validate_model(const TabularMDP& mdp, const ObservationModel& model) {
    if (model.window_length < 1)
        throw ModelMismatch("window length must be positive, got " + std::to_string(model.window_length));
    if (model.window_starts.empty()) throw ModelMismatch("observation model has no window starts");
    if (!std::is_sorted(model.window_starts.begin(), model.window_starts.end()) ||
        std::adjacent_find(model.window_starts.begin(), model.window_starts.end()) != model.window_starts.end())
        throw ModelMismatch("window starts must be sorted and unique");
    for (int t : model.window_starts) {
        if (t < 0 || t + model.window_length > mdp.horizon)
            throw ModelMismatch("window start " + std::to_string(t) + " with length " +
                                std::to_string(model.window_length) + " does not fit horizon " +
                                std::to_string(mdp.horizon));
    }
    if (model.phi.size() != mdp.num_states())
        throw ModelMismatch("phi covers " + std::to_string(model.phi.size()) + " states, MDP has " +
                            std::to_string(mdp.num_states()));
}

void validate_trajectory(const TabularMDP& mdp, const Trajectory& trajectory) {
    const auto T = static_cast<std::size_t>(mdp.horizon);
    if (trajectory.states.size() != T + 1 || trajectory.actions.size() != T || trajectory.rewards.size() != T)
        throw InvalidTrajectory("trajectory must have " + std::to_string(T) + " steps");
    if (trajectory.states.front() >= mdp.num_states() || mdp.initial[trajectory.states.front()] == 0)
        throw InvalidTrajectory("trajectory starts outside the initial distribution");
    for (std::size_t t = 0; t < T; ++t) {
        const StateId s = trajectory.states[t];
        const StateId next = trajectory.states[t + 1];
        const ActionId a = trajectory.actions[t];
        if (s >= mdp.num_states() || a >= mdp.num_actions(s))
            throw InvalidTrajectory("step " + std::to_string(t) + " uses an unknown state or action");
        const auto& outcomes = mdp.transitions[s][a];
        const bool supported = std::any_of(outcomes.begin(), outcomes.end(), [&](const Transition& tr) {
            return tr.next == next && tr.prob > 0 && tr.reward == trajectory.rewards[t];
        });
        if (!supported)
            throw InvalidTrajectory("step " + std::to_string(t) + " (" + mdp.states[s] + ", " + mdp.actions[s][a] +
                                    ") cannot reach " + (next < mdp.num_states() ? mdp.states[next] : "?") +
                                    " with reward " + to_string(trajectory.rewards[t]));
    }
}

namespace {

void append_token(std::string& out, char tag, const std::string& text) {
    out += tag;
    out += std::to_string(text.size());
    out += ':';
    out += text;
}

}  // namespace

std::string ObservedSegment::key() const {
    std::string out = "S" + std::to_string(start);
    for (std::size_t i = 0; i < features.size(); ++i) {
        append_token(out, 'F', features[i]);
        if (i < actions.size()) append_token(out, 'A', actions[i]);
        if (i < rewards.size()) append_token(out, 'R', to_string(rewards[i]));
    }
    return out;
}

std::string ObservedSegment::render() const {
    std::string out;
    for (std::size_t i = 0; i < features.size(); ++i) {
        out += features[i];
        if (i + 1 == features.size()) break;
        std::string label;
        if (i < actions.size()) label += actions[i];
        if (i < rewards.size()) label += (label.empty() ? "" : "/") + to_string(rewards[i]);
        out += " -" + label + "-> ";
    }
    return out;
}

std::vector<ObservedSegment> observe(const TabularMDP& mdp, const Trajectory& trajectory,
                                     const ObservationModel& model) {
    validate_model(mdp, model);
    validate_trajectory(mdp, trajectory);
    std::vector<ObservedSegment> out;
    out.reserve(model.window_starts.size());
    for (int start : model.window_starts) {
        ObservedSegment seg;
        seg.start = start;
        for (int k = 0; k <= model.window_length; ++k) {
            const auto t = static_cast<std::size_t>(start + k);
            seg.features.push_back(model.phi[trajectory.states[t]]);
            if (k == model.window_length) break;
            const StateId s = trajectory.states[t];
            if (model.observe_actions) seg.actions.push_back(mdp.actions[s][trajectory.actions[t]]);
            if (model.observe_rewards) seg.rewards.push_back(trajectory.rewards[t]);
        }
        out.push_back(std::move(seg));
    }
    return out;
}

std::string SegmentDistribution::canonical() const {
    std::string out;
    for (const auto& [start, masses] : per_start) {
        out += "@" + std::to_string(start) + "\n";
        for (const auto& [key, mass] : masses) out += key + "=" + to_string(mass.prob) + "\n";
    }
    return out;
}

SegmentDistribution segment_distribution(const TabularMDP& mdp, const Policy& policy,
                                         const ObservationModel& model) {
    validate_model(mdp, model);
    const auto occ = occupancy(mdp, policy);

    SegmentDistribution dist;
    dist.model = model;
    dist.policy_name = policy.name;

    for (int start : model.window_starts) {
        // Partial segments that share an observed prefix and a current state
        // are merged, so the frontier stays small under aliasing.
        std::map<std::pair<std::string, StateId>, SegmentMass> frontier;
        const auto& row = occ.rows[static_cast<std::size_t>(start)];
        for (StateId s = 0; s < mdp.num_states(); ++s) {
            if (row[s] == 0) continue;
            SegmentMass mass{ObservedSegment{start, {model.phi[s]}, {}, {}}, row[s]};
            auto key = mass.segment.key();
            frontier.emplace(std::make_pair(std::move(key), s), std::move(mass));
        }

        for (int k = 0; k < model.window_length; ++k) {
            const int t = start + k;
            std::map<std::pair<std::string, StateId>, SegmentMass> next;
            for (const auto& [entry, mass] : frontier) {
                const StateId s = entry.second;
                for (const auto& [a, pa] : action_distribution(mdp, policy, t, s)) {
                    if (pa == 0) continue;
                    for (const auto& tr : mdp.transitions[s][a]) {
                        if (tr.prob == 0) continue;
                        ObservedSegment seg = mass.segment;
                        if (model.observe_actions) seg.actions.push_back(mdp.actions[s][a]);
                        if (model.observe_rewards) seg.rewards.push_back(tr.reward);
                        seg.features.push_back(model.phi[tr.next]);
                        const Rational p = mass.prob * pa * tr.prob;
                        auto key = std::make_pair(seg.key(), tr.next);
                        auto it = next.find(key);
                        if (it == next.end())
                            next.emplace(std::move(key), SegmentMass{std::move(seg), p});
                        else
                            it->second.prob += p;
                    }
                }
            }
            frontier = std::move(next);
        }

        auto& out = dist.per_start[start];
        for (auto& [entry, mass] : frontier) {
            auto it = out.find(entry.first);
            if (it == out.end())
                out.emplace(entry.first, std::move(mass));
            else
                it->second.prob += mass.prob;
        }
    }
    return dist;
}

bool distributions_equal(const SegmentDistribution& a, const SegmentDistribution& b) {
    if (!(a.model == b.model)) throw ModelMismatch("segment distributions come from different observation models");
    if (a.per_start.size() != b.per_start.size()) return false;
    for (const auto& [start, masses] : a.per_start) {
        const auto it = b.per_start.find(start);
        if (it == b.per_start.end() || masses.size() != it->second.size()) return false;
        for (const auto& [key, mass] : masses) {
            const auto jt = it->second.find(key);
            if (jt == it->second.end() || jt->second.prob != mass.prob) return false;
        }
    }
    return true;
}

}  // namespace hsuff
