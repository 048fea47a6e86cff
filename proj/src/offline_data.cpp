#include "hsuff/offline_data.hpp"

#include "parallel.hpp"

#include <set>

namespace hsuff {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t trajectory_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed ^ splitmix64(index));
}

BigInt uniform_below(std::mt19937_64& rng, const BigInt& bound) {
    if (bound <= 0) throw InvalidParam("uniform_below needs a positive bound");
    if (bound == 1) return 0;
    const BigInt top = bound - 1;
    const auto bits = boost::multiprecision::msb(top) + 1;
    const auto words = (bits + 63) / 64;
    const BigInt mask = (BigInt(1) << bits) - 1;
    for (;;) {
        BigInt value = 0;
        for (std::size_t w = 0; w < words; ++w) value = (value << 64) | BigInt(rng());
        value &= mask;
        if (value < bound) return value;
    }
}

std::size_t sample_index(std::mt19937_64& rng, const std::vector<Rational>& weights) {
    BigInt denom = 1;
    for (const auto& w : weights) {
        const auto d = boost::multiprecision::denominator(w);
        denom = denom / boost::multiprecision::gcd(denom, d) * d;
    }
    const BigInt draw = uniform_below(rng, denom);
    BigInt cumulative = 0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        cumulative += boost::multiprecision::numerator(weights[k]) * (denom / boost::multiprecision::denominator(weights[k]));
        if (draw < cumulative) return k;
    }
    throw InvalidParam("weights do not sum to 1");
}

OfflineDataset sample_dataset(const TabularMDP& mdp, const Policy& behavior, std::size_t n, std::uint64_t seed,
                              unsigned workers) {
    if (n == 0) throw InvalidParam("sample count must be at least 1");
    require_valid(mdp);
    validate_policy(mdp, behavior);

    OfflineDataset dataset;
    dataset.behavior = behavior.name;
    dataset.seed = seed;
    dataset.trajectories.resize(n);
    detail::for_each_index(n, workers, [&](std::size_t i) {
        std::mt19937_64 rng(trajectory_seed(seed, i));
        Trajectory traj;
        traj.states.push_back(sample_index(rng, mdp.initial));
        for (int t = 0; t < mdp.horizon; ++t) {
            const StateId s = traj.states.back();
            const auto& dist = action_distribution(mdp, behavior, t, s);
            std::vector<Rational> action_weights;
            for (const auto& [a, p] : dist) action_weights.push_back(p);
            const ActionId a = dist[sample_index(rng, action_weights)].first;

            const auto& outcomes = mdp.transitions[s][a];
            std::vector<Rational> next_weights;
            for (const auto& tr : outcomes) next_weights.push_back(tr.prob);
            const auto& tr = outcomes[sample_index(rng, next_weights)];
            traj.actions.push_back(a);
            traj.rewards.push_back(tr.reward);
            traj.states.push_back(tr.next);
        }
        dataset.trajectories[i] = std::move(traj);
    });
    return dataset;
}

Rational EmpiricalSegmentStats::frequency(int start, const std::string& key) const {
    const auto it = per_start.find(start);
    if (it == per_start.end() || n == 0) return 0;
    const auto jt = it->second.find(key);
    if (jt == it->second.end()) return 0;
    return Rational(jt->second.count, n);
}

bool EmpiricalSegmentStats::operator==(const EmpiricalSegmentStats& other) const {
    if (!(model == other.model) || n != other.n || per_start.size() != other.per_start.size()) return false;
    for (const auto& [start, counts] : per_start) {
        const auto it = other.per_start.find(start);
        if (it == other.per_start.end() || it->second.size() != counts.size()) return false;
        for (const auto& [key, entry] : counts) {
            const auto jt = it->second.find(key);
            if (jt == it->second.end() || jt->second.count != entry.count) return false;
        }
    }
    return true;
}

EmpiricalSegmentStats empirical_segments(const TabularMDP& mdp, const OfflineDataset& dataset,
                                         const ObservationModel& model) {
    validate_model(mdp, model);
    EmpiricalSegmentStats stats;
    stats.model = model;
    stats.n = dataset.size();
    for (const auto& traj : dataset.trajectories) {
        std::vector<ObservedSegment> segments;
        try {
            segments = observe(mdp, traj, model);
        } catch (const InvalidTrajectory& e) {
            throw ModelMismatch(std::string("dataset does not belong to this MDP: ") + e.what());
        }
        for (auto& seg : segments) {
            auto& slot = stats.per_start[seg.start];
            auto key = seg.key();
            auto it = slot.find(key);
            if (it == slot.end())
                slot.emplace(std::move(key), SegmentCount{std::move(seg), 1});
            else
                ++it->second.count;
        }
    }
    return stats;
}

std::map<int, Rational> tv_distance(const EmpiricalSegmentStats& empirical, const SegmentDistribution& exact) {
    if (!(empirical.model == exact.model))
        throw ModelMismatch("empirical and exact statistics use different observation models");
    std::map<int, Rational> out;
    for (int start : exact.model.window_starts) {
        std::set<std::string> keys;
        if (const auto it = empirical.per_start.find(start); it != empirical.per_start.end())
            for (const auto& [key, entry] : it->second) keys.insert(key);
        const auto jt = exact.per_start.find(start);
        if (jt != exact.per_start.end())
            for (const auto& [key, mass] : jt->second) keys.insert(key);
        Rational total = 0;
        for (const auto& key : keys) {
            Rational p = 0;
            if (jt != exact.per_start.end())
                if (const auto kt = jt->second.find(key); kt != jt->second.end()) p = kt->second.prob;
            const Rational diff = empirical.frequency(start, key) - p;
            total += diff < 0 ? Rational(-diff) : diff;
        }
        out[start] = total / 2;
    }
    return out;
}

}  // namespace hsuff
