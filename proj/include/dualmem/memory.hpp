#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dualmem/rational.hpp"

namespace dualmem {

/**
 * Hyperparameters shared by the memory system and the agents.
 *
 * kappa is the fraction of STM entries consolidated into LTM at each staging
 * event, t_stage the staging period in steps. alpha/gamma/epsilon are the
 * usual temporal-difference learning knobs.
 */
struct HyperParams {
    int action_count = 4;
    Rational kappa = Rational(1);
    std::int64_t t_stage = 10;
    double alpha = 0.1;
    double gamma = 0.95;
    double epsilon = 0.1;

    void validate() const {
        if (action_count < 1) throw std::invalid_argument("action_count must be >= 1");
        if (t_stage < 1) throw std::invalid_argument("t_stage must be >= 1");
        if (kappa <= Rational(0) || kappa > Rational(1))
            throw std::invalid_argument("kappa must be in (0, 1]");
        if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must be in (0, 1]");
        if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must be in [0, 1)");
        if (!(epsilon >= 0.0 && epsilon <= 1.0))
            throw std::invalid_argument("epsilon must be in [0, 1]");
    }
};

/// 1 at staging steps (t a nonzero multiple of t_stage), 0 otherwise.
inline int staging_indicator(std::int64_t t, std::int64_t t_stage) {
    return (t != 0 && t % t_stage == 0) ? 1 : 0;
}

/**
 * One time-step record of every memory-size quantity.
 *
 * msize_dual counts three objects per LTM state and one action-value per
 * STM state; msize_q counts one action-value per replay-table state.
 * zeta = msize_q / msize_dual, undefined while msize_dual is zero.
 */
struct SizeSample {
    std::int64_t t = 0;
    std::int64_t m_s = 0;
    std::int64_t m_l = 0;
    std::int64_t m_q = 0;
    std::int64_t msize_dual = 0;
    std::int64_t msize_q = 0;
    std::optional<Rational> zeta;
};

inline SizeSample make_size_sample(std::int64_t t, std::int64_t m_s, std::int64_t m_l,
                                   std::int64_t m_q, int action_count) {
    SizeSample s;
    s.t = t;
    s.m_s = m_s;
    s.m_l = m_l;
    s.m_q = m_q;
    s.msize_dual = 3 * m_l + static_cast<std::int64_t>(action_count) * m_s;
    s.msize_q = static_cast<std::int64_t>(action_count) * m_q;
    if (s.msize_dual > 0) s.zeta = Rational(s.msize_q, s.msize_dual);
    return s;
}

template <typename Key>
struct StmEntry {
    std::vector<double> q_row;
    std::int64_t visits = 0;
    std::int64_t last_seen = 0;
};

/**
 * Short-term memory: canonical state -> full action-value row, plus the
 * visit bookkeeping used to rank entries at staging time. The bookkeeping
 * is excluded from all size accounting.
 */
template <typename Key>
class ShortTermMemory {
public:
    explicit ShortTermMemory(int action_count) : action_count_(action_count) {
        if (action_count < 1) throw std::invalid_argument("action_count must be >= 1");
    }

    /// Records one observation of `s` at step `t`. Inserts a zero-initialized
    /// row on first sight, otherwise bumps visits and recency.
    void observe(const Key& s, std::int64_t t) {
        auto [it, inserted] = entries_.try_emplace(s);
        if (inserted) {
            it->second.q_row.assign(static_cast<std::size_t>(action_count_), 0.0);
            it->second.visits = 1;
        } else {
            ++it->second.visits;
        }
        it->second.last_seen = t;
    }

    bool contains(const Key& s) const { return entries_.count(s) != 0; }

    const StmEntry<Key>* find(const Key& s) const {
        auto it = entries_.find(s);
        return it == entries_.end() ? nullptr : &it->second;
    }

    /// Mutable row access for TD updates; the state must already be present.
    std::vector<double>& q_row(const Key& s) {
        auto it = entries_.find(s);
        if (it == entries_.end()) throw std::out_of_range("state not in STM");
        return it->second.q_row;
    }

    /// m_s: number of states held.
    std::int64_t state_count() const { return static_cast<std::int64_t>(entries_.size()); }

    int action_count() const { return action_count_; }

    const std::map<Key, StmEntry<Key>>& entries() const { return entries_; }

    void erase(const Key& s) { entries_.erase(s); }

    void clear() { entries_.clear(); }

private:
    int action_count_;
    std::map<Key, StmEntry<Key>> entries_;
};

struct LtmEntry {
    int action = 0;
    double q = 0.0;
};

/**
 * Long-term memory: canonical state -> (action, Q-value). One entry per
 * state, never removed, so the state count is non-decreasing over a run.
 */
template <typename Key>
class LongTermMemory {
public:
    /// Inserts, or overwrites an existing entry when the new Q beats the
    /// stored one. Returns true when the state is new to the LTM.
    bool upsert(const Key& s, int action, double q) {
        auto [it, inserted] = entries_.try_emplace(s, LtmEntry{action, q});
        if (!inserted && q > it->second.q) {
            it->second = LtmEntry{action, q};
        }
        return inserted;
    }

    const LtmEntry* find(const Key& s) const {
        auto it = entries_.find(s);
        return it == entries_.end() ? nullptr : &it->second;
    }

    /// m_L: number of states held.
    std::int64_t state_count() const { return static_cast<std::int64_t>(entries_.size()); }

    const std::map<Key, LtmEntry>& entries() const { return entries_; }

private:
    std::map<Key, LtmEntry> entries_;
};

/// msize_Dual = 3 m_L + |A| m_s. Counts states, actions and Q-values only,
/// never the visit/recency bookkeeping.
template <typename Key>
std::int64_t msize_dual(const LongTermMemory<Key>& ltm, const ShortTermMemory<Key>& stm,
                        int action_count) {
    return 3 * ltm.state_count() + static_cast<std::int64_t>(action_count) * stm.state_count();
}

/**
 * Periodic STM -> LTM staging.
 *
 * `current` is the state observed at the staging step itself; it is treated
 * as the first post-staging observation, so any entry it already has is
 * dropped before selection. From the remaining pool, floor(kappa * m_s)
 * entries are selected (most visits first, then most recent, then key
 * order) and upserted into the LTM as (argmax action, max Q). The STM is
 * then cleared and `current` inserted fresh, leaving m_s = 1.
 *
 * Returns the number of staged entries.
 */
template <typename Key>
std::int64_t stage(ShortTermMemory<Key>& stm, LongTermMemory<Key>& ltm, const Rational& kappa,
                   const Key& current, std::int64_t t) {
    stm.erase(current);

    struct Ranked {
        const Key* key;
        const StmEntry<Key>* entry;
    };
    std::vector<Ranked> pool;
    pool.reserve(static_cast<std::size_t>(stm.state_count()));
    for (const auto& [key, entry] : stm.entries()) {
        pool.push_back(Ranked{&key, &entry});
    }
    std::sort(pool.begin(), pool.end(), [](const Ranked& a, const Ranked& b) {
        if (a.entry->visits != b.entry->visits) return a.entry->visits > b.entry->visits;
        if (a.entry->last_seen != b.entry->last_seen) return a.entry->last_seen > b.entry->last_seen;
        return *a.key < *b.key;
    });

    const std::int64_t take = floor_scale(kappa, static_cast<std::int64_t>(pool.size()));
    for (std::int64_t i = 0; i < take; ++i) {
        const auto& row = pool[static_cast<std::size_t>(i)].entry->q_row;
        const auto best = std::max_element(row.begin(), row.end());
        const int action = static_cast<int>(best - row.begin());
        ltm.upsert(*pool[static_cast<std::size_t>(i)].key, action, *best);
    }

    stm.clear();
    stm.observe(current, t);
    return take;
}

}  // namespace dualmem
