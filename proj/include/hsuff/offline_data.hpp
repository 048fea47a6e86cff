#pragma once

#include "hsuff/mdp.hpp"
#include "hsuff/observation.hpp"
#include "hsuff/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace hsuff {

/// Full trajectories drawn from a behavior policy; windows are cropped on
/// demand so one dataset can serve many observation models.
struct OfflineDataset {
    std::vector<Trajectory> trajectories;
    std::string behavior;
    std::uint64_t seed = 0;

    std::size_t size() const { return trajectories.size(); }
    bool operator==(const OfflineDataset&) const = default;
};

/// splitmix64 finaliser (Steele, Lea, Flood 2014).
std::uint64_t splitmix64(std::uint64_t x);

/// Seed of trajectory `index`: splitmix64(seed ^ splitmix64(index)). It only
/// depends on the index, so any partition of the work reproduces the data.
std::uint64_t trajectory_seed(std::uint64_t seed, std::uint64_t index);

/// Uniform integer in [0, bound) from std::mt19937_64 output by bitmask
/// rejection over 64-bit words, most significant word first.
BigInt uniform_below(std::mt19937_64& rng, const BigInt& bound);

/// Exact categorical draw: index k with probability weights[k] (rationals
/// summing to 1), via uniform_below over the common denominator.
std::size_t sample_index(std::mt19937_64& rng, const std::vector<Rational>& weights);

/**
 * Draws `n` trajectories. Trajectory i uses its own std::mt19937_64 seeded
 * with trajectory_seed(seed, i) and consumes, per step, one draw for the
 * action and one for the successor, after one draw for the initial state.
 */
OfflineDataset sample_dataset(const TabularMDP& mdp, const Policy& behavior, std::size_t n, std::uint64_t seed,
                              unsigned workers = 1);

struct SegmentCount {
    ObservedSegment segment;
    std::size_t count = 0;
};

struct EmpiricalSegmentStats {
    ObservationModel model;
    std::size_t n = 0;
    std::map<int, std::map<std::string, SegmentCount>> per_start;

    Rational frequency(int start, const std::string& key) const;
    bool operator==(const EmpiricalSegmentStats& other) const;
};

EmpiricalSegmentStats empirical_segments(const TabularMDP& mdp, const OfflineDataset& dataset,
                                         const ObservationModel& model);

/// Total-variation distance per window start between empirical frequencies
/// and an exact distribution built under the same model.
std::map<int, Rational> tv_distance(const EmpiricalSegmentStats& empirical, const SegmentDistribution& exact);

}  // namespace hsuff
