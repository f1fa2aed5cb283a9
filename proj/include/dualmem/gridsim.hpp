#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dualmem/agents.hpp"
#include "dualmem/equivalence.hpp"
#include "dualmem/memory.hpp"

namespace dualmem {

/// A signal phase: the approaches discharged while it is active.
struct Phase {
    std::string name;
    std::vector<int> serves;
};

struct ActionSpace {
    std::vector<Phase> phases;

    int count() const { return static_cast<int>(phases.size()); }

    std::vector<std::vector<int>> approach_sets() const {
        std::vector<std::vector<int>> sets;
        sets.reserve(phases.size());
        for (const auto& p : phases) {
            auto s = p.serves;
            std::sort(s.begin(), s.end());
            sets.push_back(std::move(s));
        }
        return sets;
    }

    void validate() const {
        if (count() < 4) throw std::invalid_argument("action space needs at least 4 phases");
        for (const auto& p : phases) {
            if (p.serves.empty()) throw std::invalid_argument("phase serves no approach");
            for (int a : p.serves) {
                if (a < 0 || a > 3) throw std::invalid_argument("approach index out of range");
            }
        }
        auto sets = approach_sets();
        std::sort(sets.begin(), sets.end());
        if (std::adjacent_find(sets.begin(), sets.end()) != sets.end())
            throw std::invalid_argument("duplicate phase definition");
    }
};

/// The four single-approach phases N, E, S, W: the smallest action space
/// that satisfies |A| > 3 and is closed under the dihedral symmetries.
inline ActionSpace default_action_space() {
    return ActionSpace{{Phase{"N", {kNorth}}, Phase{"E", {kEast}}, Phase{"S", {kSouth}},
                        Phase{"W", {kWest}}}};
}

struct Intersection {
    std::array<std::int64_t, 4> queues{};
    int phase = 0;
};

/**
 * R x C grid of intersections. Vehicles served at an intersection continue
 * straight through to the neighbouring intersection in their direction of
 * travel (or leave the grid), and fresh vehicles arrive on boundary
 * approaches as independent Bernoulli draws.
 */
struct GridNetwork {
    int rows = 3;
    int cols = 3;
    std::vector<Intersection> cells;
    double arrival_rate = 0.3;
    int discharge = 2;
    std::vector<std::int64_t> bins{2, 5};
    ActionSpace actions = default_action_space();

    void validate() const {
        if (rows < 1 || cols < 1) throw std::invalid_argument("grid dimensions must be >= 1");
        if (cells.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
            throw std::invalid_argument("cell array does not match grid dimensions");
        if (!(arrival_rate >= 0.0 && arrival_rate <= 1.0))
            throw std::invalid_argument("arrival_rate must be in [0, 1]");
        if (discharge < 1) throw std::invalid_argument("discharge must be >= 1");
        if (bins.empty()) throw std::invalid_argument("at least one bin bound required");
        for (std::size_t i = 1; i < bins.size(); ++i) {
            if (bins[i] <= bins[i - 1])
                throw std::invalid_argument("bin bounds must be strictly increasing");
        }
        actions.validate();
    }

    std::size_t index(int r, int c) const {
        return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) +
               static_cast<std::size_t>(c);
    }
};

inline GridNetwork make_network(int rows, int cols, double arrival_rate, int discharge,
                                std::vector<std::int64_t> bins, ActionSpace actions) {
    GridNetwork net;
    net.rows = rows;
    net.cols = cols;
    net.cells.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols),
                     Intersection{});
    net.arrival_rate = arrival_rate;
    net.discharge = discharge;
    net.bins = std::move(bins);
    net.actions = std::move(actions);
    net.validate();
    return net;
}

/// Queue length -> index of the first bin bound that covers it; anything
/// above the last bound falls into the open-ended top bin.
inline RawState encode_state(const Intersection& cell, std::span<const std::int64_t> bins) {
    RawState s;
    for (int a = 0; a < 4; ++a) {
        const std::int64_t q = cell.queues[static_cast<std::size_t>(a)];
        int idx = static_cast<int>(bins.size());
        for (std::size_t b = 0; b < bins.size(); ++b) {
            if (q <= bins[b]) {
                idx = static_cast<int>(b);
                break;
            }
        }
        s.queue_bins[static_cast<std::size_t>(a)] = idx;
    }
    s.phase = cell.phase;
    return s;
}

struct StepResult {
    std::vector<double> rewards;    // one per intersection, -(queue sum)
    std::int64_t arrivals = 0;      // Bernoulli successes this step
    std::int64_t departures = 0;    // vehicles that left the grid this step
};

namespace detail {

// Direction of travel for vehicles queued on approach a: row/col offset of
// the downstream intersection. Approach N holds southbound traffic, etc.
inline std::pair<int, int> downstream_offset(int approach) {
    switch (approach) {
        case kNorth: return {1, 0};
        case kEast: return {0, -1};
        case kSouth: return {-1, 0};
        case kWest: return {0, 1};
    }
    throw std::invalid_argument("bad approach");
}

// The upstream feeder of approach a; when it falls outside the grid the
// approach is a boundary approach and receives external arrivals.
inline std::pair<int, int> upstream_offset(int approach) {
    const auto [dr, dc] = downstream_offset(approach);
    return {-dr, -dc};
}

}  // namespace detail

/**
 * Advances the network one step. Per intersection, in row-major order:
 * set the phase from the action, discharge up to `discharge` vehicles from
 * each served approach (routing them straight through to the downstream
 * neighbour's same-label approach, or off the grid), then draw Bernoulli
 * arrivals on the intersection's boundary approaches. Rewards are the
 * negated post-step queue sums.
 */
inline StepResult step(GridNetwork& net, std::span<const int> actions, std::mt19937_64& rng) {
    if (actions.size() != net.cells.size())
        throw std::invalid_argument("need exactly one action per intersection");

    StepResult result;
    std::bernoulli_distribution arrival(net.arrival_rate);

    for (int r = 0; r < net.rows; ++r) {
        for (int c = 0; c < net.cols; ++c) {
            Intersection& cell = net.cells[net.index(r, c)];
            const int action = actions[net.index(r, c)];
            if (action < 0 || action >= net.actions.count())
                throw std::invalid_argument("action index outside the action space");
            cell.phase = action;

            for (int a : net.actions.phases[static_cast<std::size_t>(action)].serves) {
                auto& queue = cell.queues[static_cast<std::size_t>(a)];
                const std::int64_t moved = std::min<std::int64_t>(net.discharge, queue);
                queue -= moved;
                const auto [dr, dc] = detail::downstream_offset(a);
                const int nr = r + dr;
                const int nc = c + dc;
                if (nr >= 0 && nr < net.rows && nc >= 0 && nc < net.cols) {
                    net.cells[net.index(nr, nc)].queues[static_cast<std::size_t>(a)] += moved;
                } else {
                    result.departures += moved;
                }
            }

            for (int a = 0; a < 4; ++a) {
                const auto [ur, uc] = detail::upstream_offset(a);
                const int fr = r + ur;
                const int fc = c + uc;
                const bool boundary = fr < 0 || fr >= net.rows || fc < 0 || fc >= net.cols;
                if (boundary && arrival(rng)) {
                    ++cell.queues[static_cast<std::size_t>(a)];
                    ++result.arrivals;
                }
            }
        }
    }

    result.rewards.reserve(net.cells.size());
    for (const Intersection& cell : net.cells) {
        std::int64_t total = 0;
        for (std::int64_t q : cell.queues) total += q;
        result.rewards.push_back(-static_cast<double>(total));
    }
    return result;
}

/// Across-intersection average of one step's SizeSamples. zeta is the exact
/// ratio of the summed sizes.
struct MeanSample {
    std::int64_t t = 0;
    double m_s = 0;
    double m_l = 0;
    double m_q = 0;
    double msize_dual = 0;
    double msize_q = 0;
    std::optional<Rational> zeta;
};

struct ExperimentResult {
    std::vector<std::vector<SizeSample>> per_intersection;  // [cell][t]
    std::vector<MeanSample> mean;                           // [t]
    std::vector<std::int64_t> unique_raw_states;            // final count per cell
    std::vector<std::int64_t> unique_canonical_states;      // final count per cell (dual only)
};

namespace detail {

struct MemoryCounts {
    std::int64_t m_s = 0;
    std::int64_t m_l = 0;
};

inline MemoryCounts memory_counts(const SarsaAgent&) { return {0, 0}; }

inline MemoryCounts memory_counts(const DualMemoryAgent& agent) {
    return {agent.stm_state_count(), agent.ltm_state_count()};
}

inline std::int64_t replay_count(const SarsaAgent& agent, const std::set<RawState>&) {
    return agent.state_count();
}

// The dual agent keeps no replay table; meter the raw states it would have
// stored so zeta is comparable within one run.
inline std::int64_t replay_count(const DualMemoryAgent&, const std::set<RawState>& seen) {
    return static_cast<std::int64_t>(seen.size());
}

inline void note_canonical(const SarsaAgent&, const RawState&, std::set<CanonicalState>&) {}

inline void note_canonical(const DualMemoryAgent& agent, const RawState& s,
                           std::set<CanonicalState>& seen) {
    seen.insert(canonicalize(s, agent.group()));
}

}  // namespace detail

/**
 * Runs the observe -> act -> step -> learn loop for `steps` environment
 * steps with one agent per intersection, metering a SizeSample per
 * intersection per step (t = 0 is the pre-step observation sample).
 */
template <typename Agent>
ExperimentResult run_experiment(GridNetwork& net, std::vector<Agent>& agents, std::int64_t steps,
                                std::uint64_t env_seed) {
    net.validate();
    if (agents.size() != net.cells.size())
        throw std::invalid_argument("need exactly one agent per intersection");
    if (steps < 0) throw std::invalid_argument("steps must be >= 0");

    const std::size_t n = net.cells.size();
    const int action_count = net.actions.count();
    std::mt19937_64 env_rng(env_seed);

    ExperimentResult result;
    result.per_intersection.assign(n, {});
    std::vector<std::set<RawState>> raw_seen(n);
    std::vector<std::set<CanonicalState>> canon_seen(n);

    const auto record = [&](std::int64_t t) {
        std::int64_t sum_dual = 0;
        std::int64_t sum_q = 0;
        MeanSample mean;
        mean.t = t;
        for (std::size_t i = 0; i < n; ++i) {
            const auto counts = detail::memory_counts(agents[i]);
            const std::int64_t m_q = detail::replay_count(agents[i], raw_seen[i]);
            const SizeSample s =
                make_size_sample(t, counts.m_s, counts.m_l, m_q, action_count);
            result.per_intersection[i].push_back(s);
            sum_dual += s.msize_dual;
            sum_q += s.msize_q;
            mean.m_s += static_cast<double>(s.m_s);
            mean.m_l += static_cast<double>(s.m_l);
            mean.m_q += static_cast<double>(s.m_q);
            mean.msize_dual += static_cast<double>(s.msize_dual);
            mean.msize_q += static_cast<double>(s.msize_q);
        }
        const double denom = static_cast<double>(n);
        mean.m_s /= denom;
        mean.m_l /= denom;
        mean.m_q /= denom;
        mean.msize_dual /= denom;
        mean.msize_q /= denom;
        if (sum_dual > 0) mean.zeta = Rational(sum_q, sum_dual);
        result.mean.push_back(mean);
    };

    std::vector<RawState> obs(n);
    std::vector<int> act(n);
    for (std::size_t i = 0; i < n; ++i) {
        obs[i] = encode_state(net.cells[i], net.bins);
        raw_seen[i].insert(obs[i]);
        detail::note_canonical(agents[i], obs[i], canon_seen[i]);
        act[i] = agents[i].act(obs[i]);
    }
    record(0);

    for (std::int64_t k = 0; k < steps; ++k) {
        const StepResult sr = step(net, act, env_rng);
        std::vector<RawState> next_obs(n);
        std::vector<int> next_act(n);
        for (std::size_t i = 0; i < n; ++i) {
            next_obs[i] = encode_state(net.cells[i], net.bins);
            raw_seen[i].insert(next_obs[i]);
            detail::note_canonical(agents[i], next_obs[i], canon_seen[i]);
            next_act[i] = agents[i].act(next_obs[i]);
            agents[i].step_end(obs[i], act[i], sr.rewards[i], next_obs[i], next_act[i]);
        }
        record(k + 1);
        obs = std::move(next_obs);
        act = std::move(next_act);
    }

    result.unique_raw_states.reserve(n);
    result.unique_canonical_states.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        result.unique_raw_states.push_back(static_cast<std::int64_t>(raw_seen[i].size()));
        result.unique_canonical_states.push_back(static_cast<std::int64_t>(canon_seen[i].size()));
    }
    return result;
}

}  // namespace dualmem
