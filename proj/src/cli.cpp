#include "hsuff/cli.hpp"

#include "hsuff/counterexamples.hpp"
#include "hsuff/eval.hpp"
#include "hsuff/io.hpp"
#include "hsuff/offline_data.hpp"
#include "hsuff/sufficiency.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace hsuff::cli {

namespace {

using Json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct InputFile {
    std::string path;
    std::string text;
};

InputFile read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return {path, buf.str()};
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw UsageError("cannot write '" + path + "'");
}

/// Parse errors are reported against the file they came from.
template <typename Fn>
auto parse_file(const InputFile& file, Fn&& parse) {
    try {
        return parse(file.text);
    } catch (const ParseError& e) {
        throw UsageError(file.path + ": " + e.what());
    } catch (const ValidationError& e) {
        throw UsageError(file.path + ": " + e.what());
    } catch (const PolicyMismatch& e) {
        throw UsageError(file.path + ": " + e.what());
    }
}

Json input_entry(const InputFile& file) {
    return Json{{"path", file.path}, {"fnv1a64", content_hash(file.text)}};
}

std::size_t default_cap() {
    const char* env = std::getenv(cap_env_var);
    if (env == nullptr || *env == '\0') return default_policy_cap;
    try {
        std::size_t used = 0;
        const auto value = std::stoull(env, &used);
        if (used != std::string_view(env).size() || value == 0) throw std::invalid_argument(env);
        return static_cast<std::size_t>(value);
    } catch (const std::exception&) {
        throw UsageError(std::string(cap_env_var) + " must be a positive integer, got '" + env + "'");
    }
}

Rational parse_penalty(const std::string& text) {
    try {
        return parse_rational(text);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--M: ") + e.what());
    }
}

Json policy_json(const TabularMDP& mdp, const Policy& policy) {
    return Json{{"name", policy.name}, {"choices", describe_choices(mdp, policy)}};
}

Json class_json(const PolicyClassSummary& summary) {
    return Json{{"stationary", summary.stationary},
                {"total", summary.total.str()},
                {"enumerated", summary.enumerated},
                {"truncated_by_cap", summary.truncated},
                {"scope", summary.describe()}};
}

Json distribution_json(const SegmentDistribution& dist) {
    Json starts = Json::array();
    for (const auto& [start, masses] : dist.per_start) {
        Json segments = Json::array();
        Rational total = 0;
        for (const auto& [key, mass] : masses) {
            segments.push_back(Json{{"segment", mass.segment.render()}, {"prob", to_string(mass.prob)}});
            total += mass.prob;
        }
        starts.push_back(Json{{"start", start}, {"total", to_string(total)}, {"segments", segments}});
    }
    return starts;
}

std::string sibling_path(const std::string& path, const std::string& extension) {
    std::filesystem::path p(path);
    p.replace_extension(extension);
    return p.string();
}

struct Options {
    std::string family;
    int H = 0;
    std::string penalty;
    std::string output;
    std::string mdp_path, policy_path, obs_path, behavior_path;
    int truncate = -1;
    bool nonstationary = false;
    std::size_t cap = 0;
    unsigned workers = 1;
    int proposition = 0;
    std::size_t n = 0;
    std::uint64_t seed = 0;
};

int cmd_gen(const Options& o, Json& report) {
    CounterexampleSpec spec;
    try {
        spec.family = parse_family(o.family);
    } catch (const InvalidParam& e) {
        throw UsageError(e.what());
    }
    spec.H = o.H;
    if (!o.penalty.empty()) spec.penalty = parse_penalty(o.penalty);
    try {
        spec.validate();
    } catch (const InvalidParam& e) {
        throw UsageError(e.what());
    }
    const auto ce = generate(spec);
    const auto obs_path = sibling_path(o.output, ".obs");
    write_file(o.output, serialize_mdp(ce.mdp));
    write_file(obs_path, serialize_model(ce.mdp, ce.model));
    Json policies = Json::array();
    for (const auto& policy : reference_policies(spec.family, ce.mdp)) {
        const auto path = sibling_path(o.output, "." + policy.name + ".policy");
        write_file(path, serialize_policy(ce.mdp, policy));
        policies.push_back(Json{{"name", policy.name}, {"path", path}});
    }
    report["family"] = o.family;
    report["H"] = spec.H;
    if (spec.penalty) report["M"] = to_string(*spec.penalty);
    report["horizon"] = ce.mdp.horizon;
    report["states"] = ce.mdp.num_states();
    report["files"] = Json{{"mdp", o.output}, {"obs", obs_path}, {"policies", policies}};
    return exit_ok;
}

int cmd_eval(const Options& o, Json& report) {
    const auto mdp_file = read_file(o.mdp_path);
    const auto policy_file = read_file(o.policy_path);
    const auto mdp = parse_file(mdp_file, parse_mdp);
    const auto policy = parse_file(policy_file, [&](std::string_view t) { return parse_policy(t, mdp); });
    report["inputs"] = Json{input_entry(mdp_file), input_entry(policy_file)};
    report["policy"] = policy.name;
    report["full_return"] = to_string(full_return(mdp, policy));
    if (o.truncate >= 0) {
        report["truncate_h"] = o.truncate;
        report["truncated_return"] = to_string(truncated_return(mdp, policy, o.truncate));
    }
    Json steps = Json::array();
    for (const auto& r : per_step_rewards(mdp, policy)) steps.push_back(to_string(r));
    report["expected_reward_per_step"] = steps;
    return exit_ok;
}

int cmd_segdist(const Options& o, Json& report) {
    const auto mdp_file = read_file(o.mdp_path);
    const auto policy_file = read_file(o.policy_path);
    const auto obs_file = read_file(o.obs_path);
    const auto mdp = parse_file(mdp_file, parse_mdp);
    const auto policy = parse_file(policy_file, [&](std::string_view t) { return parse_policy(t, mdp); });
    const auto model = parse_file(obs_file, [&](std::string_view t) { return parse_model(t, mdp); });
    report["inputs"] = Json{input_entry(mdp_file), input_entry(policy_file), input_entry(obs_file)};
    report["policy"] = policy.name;
    report["distribution"] = distribution_json(segment_distribution(mdp, policy, model));
    return exit_ok;
}

int cmd_check(const Options& o, Json& report) {
    const auto mdp_file = read_file(o.mdp_path);
    const auto obs_file = read_file(o.obs_path);
    const auto mdp = parse_file(mdp_file, parse_mdp);
    const auto model = parse_file(obs_file, [&](std::string_view t) { return parse_model(t, mdp); });
    const PolicyClassOptions options{!o.nonstationary, o.cap, o.workers};
    const auto verdict = check_h_sufficiency(mdp, model, options);
    report["inputs"] = Json{input_entry(mdp_file), input_entry(obs_file)};
    report["verdict"] = verdict.label();
    report["sufficient"] = verdict.sufficient;
    report["policy_class"] = class_json(verdict.policy_class);
    report["distinct_distributions"] = verdict.buckets;
    if (verdict.witness) {
        const auto& w = *verdict.witness;
        report["witness"] = Json{{"first", policy_json(mdp, w.first)},
                                 {"second", policy_json(mdp, w.second)},
                                 {"first_return", to_string(w.first_return)},
                                 {"second_return", to_string(w.second_return)},
                                 {"gap", to_string(w.gap)},
                                 {"replays", replay_witness(mdp, model, w)}};
    } else {
        report["witness"] = nullptr;
    }
    return exit_ok;
}

int cmd_ordering(const Options& o, Json& report) {
    const auto mdp_file = read_file(o.mdp_path);
    const auto mdp = parse_file(mdp_file, parse_mdp);
    const PolicyClassOptions options{!o.nonstationary, o.cap, o.workers};
    const auto ordering = check_objective_consistency(mdp, o.truncate, options);
    PolicyEnumerator policies(mdp, options.stationary, options.cap);
    const auto listing = [&](const std::vector<std::size_t>& indices) {
        Json out = Json::array();
        for (auto i : indices) out.push_back(policy_json(mdp, policies.at(i)));
        return out;
    };
    report["inputs"] = Json{input_entry(mdp_file)};
    report["h"] = o.truncate;
    report["policy_class"] = class_json(ordering.policy_class);
    if (!ordering.truncated_argmax.empty()) {
        report["max_truncated_return"] = to_string(ordering.truncated_values[ordering.truncated_argmax.front()]);
        report["max_full_return"] = to_string(ordering.full_values[ordering.full_argmax.front()]);
    }
    report["truncated_argmax_count"] = ordering.truncated_argmax.size();
    report["full_argmax_count"] = ordering.full_argmax.size();
    report["truncated_argmax_behaviours"] = listing(ordering.truncated_argmax_behaviours);
    report["full_argmax_behaviours"] = listing(ordering.full_argmax_behaviours);
    report["argmax_intersect"] = ordering.argmax_intersect;
    report["ordering_consistent"] = ordering.ordering_consistent;
    if (ordering.disagreeing_pair) {
        const auto [a, b] = *ordering.disagreeing_pair;
        report["disagreeing_pair"] = Json{
            {"first", policy_json(mdp, policies.at(a))},
            {"second", policy_json(mdp, policies.at(b))},
            {"truncated_returns", Json{to_string(ordering.truncated_values[a]), to_string(ordering.truncated_values[b])}},
            {"full_returns", Json{to_string(ordering.full_values[a]), to_string(ordering.full_values[b])}}};
    }
    return exit_ok;
}

int cmd_verify(const Options& o, Json& report) {
    std::optional<Rational> penalty;
    if (!o.penalty.empty()) penalty = parse_penalty(o.penalty);
    if (o.proposition == 2 && !penalty) throw UsageError("--prop 2 needs --M with M > H+1");
    PropositionReport result;
    try {
        result = verify_proposition(o.proposition, o.H, penalty);
    } catch (const InvalidParam& e) {
        throw UsageError(e.what());
    }
    report["proposition"] = result.proposition;
    report["H"] = result.H;
    if (result.penalty) report["M"] = to_string(*result.penalty);
    report["policy_class"] = "deterministic stationary policies (exhaustive)";
    Json checks = Json::array();
    for (const auto& c : result.checks)
        checks.push_back(Json{{"claim", c.description}, {"expected", c.expected}, {"computed", c.computed}, {"pass", c.pass}});
    report["checks"] = checks;
    report["pass"] = result.pass;
    return result.pass ? exit_ok : exit_failed_verification;
}

int cmd_sample(const Options& o, Json& report) {
    const auto mdp_file = read_file(o.mdp_path);
    const auto behavior_file = read_file(o.behavior_path);
    const auto mdp = parse_file(mdp_file, parse_mdp);
    const auto behavior = parse_file(behavior_file, [&](std::string_view t) { return parse_policy(t, mdp); });
    if (o.n == 0) throw UsageError("--n must be at least 1");
    const auto dataset = sample_dataset(mdp, behavior, o.n, o.seed, o.workers);
    const auto text = serialize_dataset(mdp, dataset);
    write_file(o.output, text);
    report["inputs"] = Json{input_entry(mdp_file), input_entry(behavior_file)};
    report["behavior"] = behavior.name;
    report["n"] = dataset.size();
    report["seed"] = dataset.seed;
    report["output"] = Json{{"path", o.output}, {"fnv1a64", content_hash(text)}};
    if (!o.obs_path.empty()) {
        const auto obs_file = read_file(o.obs_path);
        const auto model = parse_file(obs_file, [&](std::string_view t) { return parse_model(t, mdp); });
        const auto stats = empirical_segments(mdp, dataset, model);
        const auto exact = segment_distribution(mdp, behavior, model);
        const auto tv = tv_distance(stats, exact);
        Json starts = Json::array();
        for (const auto& [start, counts] : stats.per_start) {
            Json segments = Json::array();
            for (const auto& [key, entry] : counts)
                segments.push_back(Json{{"segment", entry.segment.render()}, {"count", entry.count}});
            starts.push_back(Json{{"start", start}, {"tv_distance", to_string(tv.at(start))}, {"segments", segments}});
        }
        report["obs"] = input_entry(obs_file);
        report["empirical"] = starts;
    }
    return exit_ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact H-sufficiency diagnostics for tabular finite-horizon MDPs", "hsuff"};
    app.require_subcommand(1);
    Options o;

    auto* gen = app.add_subcommand("gen", "Generate a counterexample MDP, its observation model and reference policies");
    gen->add_option("family", o.family, "prefix | greedy | aliasing")->required();
    gen->add_option("--H", o.H, "Window length H")->required();
    gen->add_option("--M", o.penalty, "Trap penalty M as p/q (greedy only, M > H+1)");
    gen->add_option("-o,--output", o.output, "MDP output path; .obs and .<policy>.policy siblings are written too")
        ->required();

    auto* eval = app.add_subcommand("eval", "Exact full and truncated returns of a policy");
    eval->add_option("--mdp", o.mdp_path)->required();
    eval->add_option("--policy", o.policy_path)->required();
    eval->add_option("--truncate", o.truncate, "Inclusive last reward index h of J_h")->check(CLI::NonNegativeNumber);

    auto* segdist = app.add_subcommand("segdist", "Exact distribution of observed segments under a policy");
    segdist->add_option("--mdp", o.mdp_path)->required();
    segdist->add_option("--policy", o.policy_path)->required();
    segdist->add_option("--obs", o.obs_path)->required();

    auto* check = app.add_subcommand("check", "Decide H-sufficiency over deterministic policies");
    check->add_option("--mdp", o.mdp_path)->required();
    check->add_option("--obs", o.obs_path)->required();
    check->add_flag("--nonstationary", o.nonstationary, "Enumerate time-indexed policies");
    check->add_option("--cap", o.cap, "Enumeration cap (default from " + std::string(cap_env_var) + ", else 1000000)")
        ->check(CLI::PositiveNumber);
    check->add_option("--workers", o.workers)->check(CLI::PositiveNumber);

    auto* ordering = app.add_subcommand("ordering", "Compare J_h and J orderings over deterministic policies");
    ordering->set_help_flag("--help", "Print this help message and exit");  // -h would clash with --h
    ordering->add_option("--mdp", o.mdp_path)->required();
    ordering->add_option("--h", o.truncate, "Inclusive last reward index h of J_h")->required()->check(CLI::NonNegativeNumber);
    ordering->add_flag("--nonstationary", o.nonstationary);
    ordering->add_option("--cap", o.cap)->check(CLI::PositiveNumber);
    ordering->add_option("--workers", o.workers)->check(CLI::PositiveNumber);

    auto* verify = app.add_subcommand("verify", "Verify a counterexample proposition with exact arithmetic");
    verify->add_option("--prop", o.proposition)->required()->check(CLI::Range(1, 3));
    verify->add_option("--H", o.H)->required();
    verify->add_option("--M", o.penalty, "Trap penalty M as p/q (proposition 2)");

    auto* sample = app.add_subcommand("sample", "Sample an offline dataset from a behavior policy");
    sample->add_option("--mdp", o.mdp_path)->required();
    sample->add_option("--behavior", o.behavior_path)->required();
    sample->add_option("--n", o.n)->required();
    sample->add_option("--seed", o.seed)->required();
    sample->add_option("-o,--output", o.output)->required();
    sample->add_option("--obs", o.obs_path, "Also report empirical segment counts and TV distance under this model");
    sample->add_option("--workers", o.workers)->check(CLI::PositiveNumber);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }

    Json report;
    int status = exit_ok;
    try {
        if (o.cap == 0) o.cap = default_cap();
        const auto* cmd = app.get_subcommands().front();
        report["command"] = cmd->get_name();
        if (cmd == gen) status = cmd_gen(o, report);
        else if (cmd == eval) status = cmd_eval(o, report);
        else if (cmd == segdist) status = cmd_segdist(o, report);
        else if (cmd == check) status = cmd_check(o, report);
        else if (cmd == ordering) status = cmd_ordering(o, report);
        else if (cmd == verify) status = cmd_verify(o, report);
        else if (cmd == sample) status = cmd_sample(o, report);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
    out << report.dump(2) << "\n";
    return status;
}

}  // namespace hsuff::cli
