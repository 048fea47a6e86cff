#include "hsuff/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <optional>
#include <set>

namespace hsuff {

namespace {

struct Token {
    std::string text;
    std::size_t column = 0;
};

struct Line {
    std::size_t number = 0;
    std::vector<Token> tokens;
};

std::vector<Line> tokenize(std::string_view text) {
    std::vector<Line> lines;
    std::size_t number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = std::min(text.find('\n', pos), text.size());
        ++number;
        std::string_view raw = text.substr(pos, end - pos);
        if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        Line line{number, {}};
        std::size_t i = 0;
        while (i < raw.size()) {
            while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
            const auto begin = i;
            while (i < raw.size() && !std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
            if (i > begin) line.tokens.push_back({std::string(raw.substr(begin, i - begin)), begin + 1});
        }
        if (!line.tokens.empty()) lines.push_back(std::move(line));
        if (end == text.size()) break;
        pos = end + 1;
    }
    if (lines.empty()) throw ParseError(0, 0, "empty document");
    return lines;
}

[[noreturn]] void fail(const Line& line, const Token& token, const std::string& what) {
    throw ParseError(line.number, token.column, what);
}

[[noreturn]] void fail_end(const std::vector<Line>& lines, const std::string& what) {
    throw ParseError(lines.back().number + 1, 1, what);
}

void expect_arity(const Line& line, std::size_t min, std::size_t max) {
    const auto n = line.tokens.size() - 1;
    if (n < min) fail(line, line.tokens.back(), "'" + line.tokens[0].text + "' needs more arguments");
    if (n > max) fail(line, line.tokens[max + 1], "unexpected extra argument to '" + line.tokens[0].text + "'");
}

Rational rational_at(const Line& line, const Token& token) {
    try {
        return parse_rational(token.text);
    } catch (const std::invalid_argument& e) {
        fail(line, token, e.what());
    }
}

long long integer_at(const Line& line, const Token& token) {
    long long value = 0;
    const auto* first = token.text.data();
    const auto* last = first + token.text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) fail(line, token, "expected an integer, got '" + token.text + "'");
    return value;
}

std::uint64_t unsigned_at(const Line& line, const Token& token) {
    std::uint64_t value = 0;
    const auto* first = token.text.data();
    const auto* last = first + token.text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) fail(line, token, "expected an unsigned integer, got '" + token.text + "'");
    return value;
}

bool flag_at(const Line& line, const Token& token) {
    if (token.text == "on") return true;
    if (token.text == "off") return false;
    fail(line, token, "expected 'on' or 'off', got '" + token.text + "'");
}

StateId state_at(const TabularMDP& mdp, const Line& line, const Token& token) {
    const auto s = mdp.find_state(token.text);
    if (!s) fail(line, token, "unknown state '" + token.text + "'");
    return *s;
}

ActionId action_at(const TabularMDP& mdp, StateId s, const Line& line, const Token& token) {
    const auto a = mdp.find_action(s, token.text);
    if (!a) fail(line, token, "state " + mdp.states[s] + " has no action '" + token.text + "'");
    return *a;
}

void check_unique(std::set<std::string>& seen, const Line& line) {
    if (!seen.insert(line.tokens[0].text).second) fail(line, line.tokens[0], "duplicate '" + line.tokens[0].text + "'");
}

}  // namespace

std::string serialize_mdp(const TabularMDP& mdp) {
    std::string out = "states";
    for (const auto& s : mdp.states) out += " " + s;
    out += "\nhorizon " + std::to_string(mdp.horizon) + "\n";
    std::string terminals;
    for (StateId s = 0; s < mdp.num_states(); ++s)
        if (mdp.is_terminal(s)) terminals += " " + mdp.states[s];
    if (!terminals.empty()) out += "terminal" + terminals + "\n";
    for (StateId s = 0; s < mdp.num_states(); ++s) {
        out += "actions " + mdp.states[s];
        for (const auto& a : mdp.actions[s]) out += " " + a;
        out += "\n";
    }
    for (StateId s = 0; s < mdp.num_states(); ++s)
        for (ActionId a = 0; a < mdp.num_actions(s); ++a)
            for (const auto& tr : mdp.transitions[s][a])
                out += "transition " + mdp.states[s] + " " + mdp.actions[s][a] + " " + mdp.states[tr.next] + " " +
                       to_string(tr.prob) + " " + to_string(tr.reward) + "\n";
    for (StateId s = 0; s < mdp.num_states(); ++s)
        if (mdp.initial[s] != 0) out += "initial " + mdp.states[s] + " " + to_string(mdp.initial[s]) + "\n";
    return out;
}

TabularMDP parse_mdp(std::string_view text) {
    const auto lines = tokenize(text);
    TabularMDP mdp;
    std::set<std::string> seen;
    bool have_states = false, have_horizon = false;
    std::set<StateId> declared_actions;

    const auto need_states = [&](const Line& line) {
        if (!have_states) fail(line, line.tokens[0], "'states' must come before '" + line.tokens[0].text + "'");
    };

    for (const auto& line : lines) {
        const auto& key = line.tokens[0].text;
        if (key == "states") {
            check_unique(seen, line);
            expect_arity(line, 1, SIZE_MAX);
            for (std::size_t i = 1; i < line.tokens.size(); ++i) {
                if (mdp.find_state(line.tokens[i].text))
                    fail(line, line.tokens[i], "duplicate state '" + line.tokens[i].text + "'");
                mdp.add_state(line.tokens[i].text);
            }
            have_states = true;
        } else if (key == "horizon") {
            check_unique(seen, line);
            expect_arity(line, 1, 1);
            const auto h = integer_at(line, line.tokens[1]);
            if (h < 1 || h > 1'000'000) fail(line, line.tokens[1], "horizon must be a positive integer");
            mdp.horizon = static_cast<int>(h);
            have_horizon = true;
        } else if (key == "terminal") {
            check_unique(seen, line);
            need_states(line);
            for (std::size_t i = 1; i < line.tokens.size(); ++i)
                mdp.terminal[state_at(mdp, line, line.tokens[i])] = true;
        } else if (key == "actions") {
            need_states(line);
            expect_arity(line, 1, SIZE_MAX);
            const StateId s = state_at(mdp, line, line.tokens[1]);
            if (!declared_actions.insert(s).second)
                fail(line, line.tokens[1], "actions of state " + mdp.states[s] + " declared twice");
            for (std::size_t i = 2; i < line.tokens.size(); ++i) {
                if (mdp.find_action(s, line.tokens[i].text))
                    fail(line, line.tokens[i], "duplicate action '" + line.tokens[i].text + "'");
                mdp.add_action(s, line.tokens[i].text);
            }
        } else if (key == "transition") {
            need_states(line);
            expect_arity(line, 5, 5);
            const StateId s = state_at(mdp, line, line.tokens[1]);
            const ActionId a = action_at(mdp, s, line, line.tokens[2]);
            const StateId next = state_at(mdp, line, line.tokens[3]);
            mdp.add_transition(s, a, next, rational_at(line, line.tokens[4]), rational_at(line, line.tokens[5]));
        } else if (key == "initial") {
            need_states(line);
            expect_arity(line, 2, 2);
            const StateId s = state_at(mdp, line, line.tokens[1]);
            mdp.initial[s] += rational_at(line, line.tokens[2]);
        } else {
            fail(line, line.tokens[0], "unknown field '" + key + "'");
        }
    }
    if (!have_states) fail_end(lines, "missing 'states'");
    if (!have_horizon) fail_end(lines, "missing 'horizon'");
    for (StateId s = 0; s < mdp.num_states(); ++s)
        if (mdp.is_terminal(s) && mdp.actions[s].empty()) mdp.make_absorbing(s);
    require_valid(mdp);
    return mdp;
}

std::string serialize_policy(const TabularMDP& mdp, const Policy& policy) {
    std::string out = "policy " + (policy.name.empty() ? std::string("unnamed") : policy.name) + "\n";
    out += std::string("kind ") + (policy.kind == PolicyKind::deterministic ? "deterministic" : "stochastic") + "\n";
    out += "horizon " + std::to_string(policy.horizon) + "\n";
    const auto cell_text = [&](StateId s, const ActionDistribution& cell) {
        std::string text;
        for (const auto& [a, p] : cell) {
            text += " " + mdp.actions[s][a];
            if (policy.kind == PolicyKind::stochastic) text += ":" + to_string(p);
        }
        return text;
    };
    const bool stationary = !policy.rows.empty() &&
                            std::all_of(policy.rows.begin(), policy.rows.end(),
                                        [&](const auto& row) { return row == policy.rows.front(); });
    if (stationary) {
        for (StateId s = 0; s < policy.rows.front().size(); ++s)
            if (!policy.rows.front()[s].empty())
                out += "rule * " + mdp.states[s] + cell_text(s, policy.rows.front()[s]) + "\n";
    } else {
        for (std::size_t t = 0; t < policy.rows.size(); ++t)
            for (StateId s = 0; s < policy.rows[t].size(); ++s)
                if (!policy.rows[t][s].empty())
                    out += "rule " + std::to_string(t) + " " + mdp.states[s] + cell_text(s, policy.rows[t][s]) + "\n";
    }
    return out;
}

Policy parse_policy(std::string_view text, const TabularMDP& mdp) {
    const auto lines = tokenize(text);
    Policy policy;
    policy.horizon = mdp.horizon;
    std::set<std::string> seen;
    bool have_kind = false;
    policy.rows.assign(static_cast<std::size_t>(mdp.horizon), std::vector<ActionDistribution>(mdp.num_states()));

    for (const auto& line : lines) {
        const auto& key = line.tokens[0].text;
        if (key == "policy") {
            check_unique(seen, line);
            expect_arity(line, 1, 1);
            policy.name = line.tokens[1].text;
        } else if (key == "kind") {
            check_unique(seen, line);
            expect_arity(line, 1, 1);
            if (line.tokens[1].text == "deterministic")
                policy.kind = PolicyKind::deterministic;
            else if (line.tokens[1].text == "stochastic")
                policy.kind = PolicyKind::stochastic;
            else
                fail(line, line.tokens[1], "kind must be 'deterministic' or 'stochastic'");
            have_kind = true;
        } else if (key == "horizon") {
            check_unique(seen, line);
            expect_arity(line, 1, 1);
            const auto h = integer_at(line, line.tokens[1]);
            if (h != mdp.horizon)
                fail(line, line.tokens[1],
                     "policy horizon " + line.tokens[1].text + " does not match MDP horizon " +
                         std::to_string(mdp.horizon));
        } else if (key == "rule") {
            if (!have_kind) fail(line, line.tokens[0], "'kind' must come before 'rule'");
            expect_arity(line, 3, SIZE_MAX);
            std::vector<int> times;
            if (line.tokens[1].text == "*") {
                for (int t = 0; t < mdp.horizon; ++t) times.push_back(t);
            } else {
                const auto t = integer_at(line, line.tokens[1]);
                if (t < 0 || t >= mdp.horizon) fail(line, line.tokens[1], "timestep out of range");
                times.push_back(static_cast<int>(t));
            }
            const StateId s = state_at(mdp, line, line.tokens[2]);
            ActionDistribution cell;
            for (std::size_t i = 3; i < line.tokens.size(); ++i) {
                const auto& tok = line.tokens[i];
                const auto colon = tok.text.rfind(':');
                if (policy.kind == PolicyKind::deterministic) {
                    if (line.tokens.size() != 4) fail(line, tok, "deterministic rule takes exactly one action");
                    cell.emplace_back(action_at(mdp, s, line, tok), Rational(1));
                } else {
                    if (colon == std::string::npos) fail(line, tok, "stochastic rule entries are action:prob");
                    Token action{tok.text.substr(0, colon), tok.column};
                    Token prob{tok.text.substr(colon + 1), tok.column + colon + 1};
                    cell.emplace_back(action_at(mdp, s, line, action), rational_at(line, prob));
                }
            }
            for (int t : times) {
                auto& slot = policy.rows[t][s];
                if (!slot.empty())
                    fail(line, line.tokens[2], "rule for state " + mdp.states[s] + " at t=" + std::to_string(t) +
                                                   " given twice");
                slot = cell;
            }
        } else {
            fail(line, line.tokens[0], "unknown field '" + key + "'");
        }
    }
    if (!have_kind) fail_end(lines, "missing 'kind'");
    validate_policy(mdp, policy);
    return policy;
}

std::string serialize_model(const TabularMDP& mdp, const ObservationModel& model) {
    std::string out = "window_length " + std::to_string(model.window_length) + "\nwindow_starts";
    for (int t : model.window_starts) out += " " + std::to_string(t);
    out += "\n";
    for (StateId s = 0; s < mdp.num_states() && s < model.phi.size(); ++s)
        if (model.phi[s] != mdp.states[s]) out += "phi " + mdp.states[s] + " " + model.phi[s] + "\n";
    out += std::string("observe_actions ") + (model.observe_actions ? "on" : "off") + "\n";
    out += std::string("observe_rewards ") + (model.observe_rewards ? "on" : "off") + "\n";
    return out;
}

ObservationModel parse_model(std::string_view text, const TabularMDP& mdp) {
    const auto lines = tokenize(text);
    ObservationModel model;
    model.phi = mdp.states;
    std::set<std::string> seen;
    std::set<StateId> mapped;
    bool have_length = false, all_starts = false;
    std::optional<std::size_t> starts_line;

    for (const auto& line : lines) {
        const auto& key = line.tokens[0].text;
        if (key == "window_length") {
            check_unique(seen, line);
            expect_arity(line, 1, 1);
            const auto h = integer_at(line, line.tokens[1]);
            if (h < 1 || h > mdp.horizon)
                fail(line, line.tokens[1], "window length must be in [1, " + std::to_string(mdp.horizon) + "]");
            model.window_length = static_cast<int>(h);
            have_length = true;
        } else if (key == "window_starts") {
            check_unique(seen, line);
            expect_arity(line, 1, SIZE_MAX);
            starts_line = line.number;
            if (line.tokens.size() == 2 && line.tokens[1].text == "all") {
                all_starts = true;
                continue;
            }
            for (std::size_t i = 1; i < line.tokens.size(); ++i) {
                const auto t = integer_at(line, line.tokens[i]);
                if (t < 0 || t > mdp.horizon) fail(line, line.tokens[i], "window start out of range");
                model.window_starts.push_back(static_cast<int>(t));
            }
            std::sort(model.window_starts.begin(), model.window_starts.end());
            model.window_starts.erase(std::unique(model.window_starts.begin(), model.window_starts.end()),
                                      model.window_starts.end());
        } else if (key == "phi") {
            expect_arity(line, 2, 2);
            const StateId s = state_at(mdp, line, line.tokens[1]);
            if (!mapped.insert(s).second) fail(line, line.tokens[1], "phi of " + mdp.states[s] + " given twice");
            model.phi[s] = line.tokens[2].text;
        } else if (key == "observe_actions") {
            check_unique(seen, line);
            expect_arity(line, 1, 1);
            model.observe_actions = flag_at(line, line.tokens[1]);
        } else if (key == "observe_rewards") {
            check_unique(seen, line);
            expect_arity(line, 1, 1);
            model.observe_rewards = flag_at(line, line.tokens[1]);
        } else {
            fail(line, line.tokens[0], "unknown field '" + key + "'");
        }
    }
    if (!have_length) fail_end(lines, "missing 'window_length'");
    if (all_starts || !starts_line) {
        model.window_starts.clear();
        for (int t = 0; t + model.window_length <= mdp.horizon; ++t) model.window_starts.push_back(t);
    }
    try {
        validate_model(mdp, model);
    } catch (const ModelMismatch& e) {
        throw ParseError(starts_line.value_or(lines.front().number), 1, e.what());
    }
    return model;
}

std::string serialize_dataset(const TabularMDP& mdp, const OfflineDataset& dataset) {
    std::string out = "dataset\nbehavior " + (dataset.behavior.empty() ? std::string("unnamed") : dataset.behavior) +
                      "\nseed " + std::to_string(dataset.seed) + "\nn " + std::to_string(dataset.size()) + "\n";
    for (const auto& traj : dataset.trajectories) {
        out += "trajectory";
        for (std::size_t t = 0; t < traj.actions.size(); ++t)
            out += " " + mdp.states[traj.states[t]] + " " + mdp.actions[traj.states[t]][traj.actions[t]] + " " +
                   to_string(traj.rewards[t]);
        out += " " + mdp.states[traj.states.back()] + "\n";
    }
    return out;
}

OfflineDataset parse_dataset(std::string_view text, const TabularMDP& mdp) {
    const auto lines = tokenize(text);
    if (lines.front().tokens[0].text != "dataset" || lines.front().tokens.size() != 1)
        fail(lines.front(), lines.front().tokens[0], "dataset documents start with 'dataset'");
    OfflineDataset dataset;
    std::set<std::string> seen;
    std::optional<std::uint64_t> declared_n;
    const auto T = static_cast<std::size_t>(mdp.horizon);

    for (std::size_t li = 1; li < lines.size(); ++li) {
        const auto& line = lines[li];
        const auto& key = line.tokens[0].text;
        if (key == "behavior") {
            check_unique(seen, line);
            expect_arity(line, 1, 1);
            dataset.behavior = line.tokens[1].text;
        } else if (key == "seed") {
            check_unique(seen, line);
            expect_arity(line, 1, 1);
            dataset.seed = unsigned_at(line, line.tokens[1]);
        } else if (key == "n") {
            check_unique(seen, line);
            expect_arity(line, 1, 1);
            declared_n = unsigned_at(line, line.tokens[1]);
        } else if (key == "trajectory") {
            if (line.tokens.size() != 3 * T + 2)
                fail(line, line.tokens[0], "trajectory must list " + std::to_string(T) + " steps plus a final state");
            Trajectory traj;
            for (std::size_t t = 0; t < T; ++t) {
                const auto& st = line.tokens[1 + 3 * t];
                const StateId s = state_at(mdp, line, st);
                traj.states.push_back(s);
                traj.actions.push_back(action_at(mdp, s, line, line.tokens[2 + 3 * t]));
                traj.rewards.push_back(rational_at(line, line.tokens[3 + 3 * t]));
            }
            traj.states.push_back(state_at(mdp, line, line.tokens.back()));
            try {
                validate_trajectory(mdp, traj);
            } catch (const InvalidTrajectory& e) {
                fail(line, line.tokens[0], e.what());
            }
            dataset.trajectories.push_back(std::move(traj));
        } else {
            fail(line, line.tokens[0], "unknown field '" + key + "'");
        }
    }
    if (!declared_n) fail_end(lines, "missing 'n'");
    if (*declared_n != dataset.size())
        fail_end(lines, "declared n=" + std::to_string(*declared_n) + " but found " +
                            std::to_string(dataset.size()) + " trajectories");
    return dataset;
}

std::string content_hash(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace hsuff
