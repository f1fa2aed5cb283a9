#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

#include "dualmem/equivalence.hpp"
#include "dualmem/memory.hpp"

namespace dualmem {

/// One SARSA temporal-difference step on a single row entry:
/// q[a] += alpha * (r + gamma * q_next - q[a]).
inline std::vector<double> sarsa_update(std::vector<double> q_row, int a, double r, double q_next,
                                        const HyperParams& hp) {
    if (a < 0 || a >= static_cast<int>(q_row.size()))
        throw std::invalid_argument("action index outside q_row");
    const double q_a = q_row[static_cast<std::size_t>(a)];
    if (!std::isfinite(r) || !std::isfinite(q_next) || !std::isfinite(q_a))
        throw std::domain_error("non-finite value in TD update");
    q_row[static_cast<std::size_t>(a)] = q_a + hp.alpha * (r + hp.gamma * q_next - q_a);
    return q_row;
}

/// Deduplicated raw-state -> action-value-row table. m_Q is its key count;
/// the replay buffer size is |A| * m_Q.
class ReplayTable {
public:
    explicit ReplayTable(int action_count) : action_count_(action_count) {
        if (action_count < 1) throw std::invalid_argument("action_count must be >= 1");
    }

    /// Returns the row for s, inserting a zero row first if s is new. This
    /// is the only way the table grows.
    std::vector<double>& ensure_row(const RawState& s) {
        auto [it, inserted] = entries_.try_emplace(s);
        if (inserted) it->second.assign(static_cast<std::size_t>(action_count_), 0.0);
        return it->second;
    }

    std::vector<double>& row(const RawState& s) {
        auto it = entries_.find(s);
        if (it == entries_.end()) throw std::out_of_range("state not in replay table");
        return it->second;
    }

    const std::vector<double>* find(const RawState& s) const {
        auto it = entries_.find(s);
        return it == entries_.end() ? nullptr : &it->second;
    }

    std::int64_t state_count() const { return static_cast<std::int64_t>(entries_.size()); }

    int action_count() const { return action_count_; }

private:
    int action_count_;
    std::map<RawState, std::vector<double>> entries_;
};

namespace detail {

inline int argmax_first(const std::vector<double>& row) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(row.size()); ++i) {
        if (row[static_cast<std::size_t>(i)] > row[static_cast<std::size_t>(best)]) best = i;
    }
    return best;
}

}  // namespace detail

/**
 * The non-memory baseline: epsilon-greedy tabular SARSA over raw
 * (non-canonicalized) states with a deduplicated replay table.
 */
class SarsaAgent {
public:
    SarsaAgent(const HyperParams& hp, std::uint64_t seed)
        : hp_(hp), table_(hp.action_count), rng_(seed) {
        hp_.validate();
    }

    /// Epsilon-greedy action for s. Always materializes the row for s, so
    /// the table tracks exactly the set of encountered states.
    int act(const RawState& s) {
        const std::vector<double>& row = table_.ensure_row(s);
        if (explore_draw()) return uniform_action();
        return detail::argmax_first(row);
    }

    void step_end(const RawState& s, int a, double r, const RawState& next_s, int next_a) {
        const double q_next = table_.row(next_s)[static_cast<std::size_t>(next_a)];
        table_.row(s) = sarsa_update(table_.row(s), a, r, q_next, hp_);
        ++step_counter_;
    }

    std::int64_t state_count() const { return table_.state_count(); }
    std::int64_t step_counter() const { return step_counter_; }
    const ReplayTable& table() const { return table_; }
    const HyperParams& hyper_params() const { return hp_; }

private:
    bool explore_draw() {
        return std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < hp_.epsilon;
    }
    int uniform_action() {
        return std::uniform_int_distribution<int>(0, hp_.action_count - 1)(rng_);
    }

    HyperParams hp_;
    ReplayTable table_;
    std::mt19937_64 rng_;
    std::int64_t step_counter_ = 0;
};

/**
 * The dual-memory agent. Every observation is canonicalized, learning
 * happens on STM rows keyed by canonical state, and every t_stage steps a
 * kappa fraction of the STM is consolidated into the LTM.
 *
 * Action selection runs in the canonical frame (exploration included) and
 * the chosen action is mapped back through the inverse of the element that
 * canonicalized the observation, so the policy is equivariant under the
 * group.
 */
class DualMemoryAgent {
public:
    DualMemoryAgent(const HyperParams& hp, SymmetryGroup group, std::uint64_t seed)
        : hp_(hp), group_(std::move(group)), stm_(hp.action_count), rng_(seed) {
        hp_.validate();
        if (group_.phase_count() != hp_.action_count)
            throw std::invalid_argument("group phase count must match action_count");
    }

    /// Picks the action for s and records the step's single STM observation.
    /// LTM consultation takes priority over the STM row when greedy.
    int act(const RawState& s) {
        const CanonicalFrame frame = canonicalize_frame(s, group_);
        stm_.observe(frame.state, step_counter_);

        int canonical_action;
        if (explore_draw()) {
            canonical_action = uniform_action();
        } else if (const LtmEntry* hit = ltm_.find(frame.state)) {
            canonical_action = hit->action;
        } else {
            canonical_action = detail::argmax_first(stm_.find(frame.state)->q_row);
        }
        return remap_action(canonical_action, group_.inverse(frame.element_index));
    }

    /// Learns from one transition and, when the step counter crosses a
    /// staging boundary, consolidates the STM into the LTM with the
    /// canonical next state as the fresh post-staging observation.
    void step_end(const RawState& s, int a, double r, const RawState& next_s, int next_a) {
        const CanonicalFrame frame = canonicalize_frame(s, group_);
        const CanonicalFrame next_frame = canonicalize_frame(next_s, group_);
        const int ca = remap_action(a, group_.element(frame.element_index));
        const int next_ca = remap_action(next_a, group_.element(next_frame.element_index));

        double q_next = 0.0;
        if (const StmEntry<CanonicalState>* entry = stm_.find(next_frame.state)) {
            q_next = entry->q_row[static_cast<std::size_t>(next_ca)];
        } else if (const LtmEntry* hit = ltm_.find(next_frame.state)) {
            q_next = hit->q;
        }

        stm_.q_row(frame.state) = sarsa_update(stm_.q_row(frame.state), ca, r, q_next, hp_);

        ++step_counter_;
        if (staging_indicator(step_counter_, hp_.t_stage)) {
            stage(stm_, ltm_, hp_.kappa, next_frame.state, step_counter_);
            ++staging_events_;
        }
    }

    std::int64_t stm_state_count() const { return stm_.state_count(); }
    std::int64_t ltm_state_count() const { return ltm_.state_count(); }
    std::int64_t step_counter() const { return step_counter_; }
    std::int64_t staging_events() const { return staging_events_; }
    const ShortTermMemory<CanonicalState>& stm() const { return stm_; }
    const LongTermMemory<CanonicalState>& ltm() const { return ltm_; }
    const SymmetryGroup& group() const { return group_; }
    const HyperParams& hyper_params() const { return hp_; }

private:
    bool explore_draw() {
        return std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < hp_.epsilon;
    }
    int uniform_action() {
        return std::uniform_int_distribution<int>(0, hp_.action_count - 1)(rng_);
    }

    HyperParams hp_;
    SymmetryGroup group_;
    ShortTermMemory<CanonicalState> stm_;
    LongTermMemory<CanonicalState> ltm_;
    std::mt19937_64 rng_;
    std::int64_t step_counter_ = 0;
    std::int64_t staging_events_ = 0;
};

}  // namespace dualmem
