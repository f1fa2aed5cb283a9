#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "dualmem/memory.hpp"
#include "dualmem/rational.hpp"

namespace dualmem {

enum class ScenarioKind { kWorst, kBest, kReplay };

inline const char* to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::kWorst: return "worst";
        case ScenarioKind::kBest: return "best";
        case ScenarioKind::kReplay: return "replay";
    }
    return "?";
}

/**
 * A synthetic memory trajectory. `worst` feeds an endless stream of fresh
 * states, `best` cycles through m_unique states (so every state past
 * tau = m_unique - 1 lands in an existing class), `replay` feeds the given
 * stream of state keys.
 */
struct ScenarioSpec {
    ScenarioKind kind = ScenarioKind::kWorst;
    int action_count = 8;
    std::int64_t t_stage = 10;
    Rational kappa = Rational(1);
    std::optional<std::int64_t> m_unique;  // best only: M
    std::optional<std::int64_t> tau;       // best only; defaults to M - 1
    std::int64_t horizon = 0;              // last step traced; ignored for replay
    std::vector<std::int64_t> stream;      // replay only

    std::int64_t effective_tau() const { return tau ? *tau : (m_unique ? *m_unique - 1 : 0); }

    void validate() const {
        if (action_count < 1) throw std::invalid_argument("action_count must be >= 1");
        if (t_stage < 1) throw std::invalid_argument("t_stage must be >= 1");
        if (kappa <= Rational(0) || kappa > Rational(1))
            throw std::invalid_argument("kappa must be in (0, 1]");
        switch (kind) {
            case ScenarioKind::kWorst:
                if (horizon < 0) throw std::invalid_argument("horizon must be >= 0");
                break;
            case ScenarioKind::kBest: {
                if (!m_unique || *m_unique < 1)
                    throw std::invalid_argument("best scenario needs m_unique >= 1");
                if (tau && *tau != *m_unique - 1)
                    throw std::invalid_argument("tau must equal m_unique - 1 for the cyclic stream");
                if (horizon < effective_tau())
                    throw std::invalid_argument("horizon must reach tau (all unique states seen)");
                break;
            }
            case ScenarioKind::kReplay:
                if (stream.empty()) throw std::invalid_argument("replay scenario needs a stream");
                break;
        }
    }
};

struct ZetaPair {
    Rational zeta1;  // at a staging step t = n * t_stage
    Rational zeta2;  // one step earlier, t = n * t_stage - 1
};

/// Closed-form comparison ratios for the all-states-unique trajectory at
/// the n-th staging boundary.
inline ZetaPair zeta_worst(std::int64_t n, int action_count, std::int64_t t_stage,
                           const Rational& kappa) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    const std::int64_t a = action_count;
    const std::int64_t t = t_stage;
    ZetaPair z;
    z.zeta1 = Rational((n * t + 1) * a) / (Rational(a) + Rational(3 * n * t) * kappa);
    z.zeta2 = Rational(n * t * a) / (Rational(t * a) + Rational(3 * (n - 1) * t) * kappa);
    return z;
}

/// Closed-form comparison ratios once all M unique classes are in the LTM;
/// independent of n and kappa from that point on.
inline ZetaPair zeta_best(std::int64_t m_unique, int action_count, std::int64_t t_stage) {
    if (m_unique < 1) throw std::invalid_argument("m_unique must be >= 1");
    const std::int64_t a = action_count;
    ZetaPair z;
    z.zeta1 = Rational(m_unique * a, a + 3 * m_unique);
    z.zeta2 = Rational(m_unique * a, t_stage * a + 3 * m_unique);
    return z;
}

struct ConstraintCheck {
    std::string name;
    bool satisfied = false;
    std::optional<Rational> margin;  // signed; absent when the bound is undefined
};

struct BoundReport {
    std::optional<Rational> zeta1;
    std::optional<Rational> zeta2;
    std::vector<ConstraintCheck> constraints;

    bool all_satisfied() const {
        for (const auto& c : constraints) {
            if (!c.satisfied) return false;
        }
        return true;
    }

    const ConstraintCheck* find(const std::string& name) const {
        for (const auto& c : constraints) {
            if (c.name == name) return &c;
        }
        return nullptr;
    }
};

/**
 * Checks the hyperparameter design inequalities: |A| > 3 and, when M is
 * given, M >= T |A| / (|A| - 3) from the environment; kappa <= |A| / 3 and
 * T > 2 for the memory itself. Violations are report entries, not errors.
 * At |A| <= 3 the M bound is undefined and reported unsatisfiable.
 */
inline BoundReport check_constraints(int action_count, const Rational& kappa,
                                     std::int64_t t_stage,
                                     std::optional<std::int64_t> m_unique = std::nullopt) {
    BoundReport report;
    report.constraints.push_back(
        {"action_space", action_count > 3, Rational(action_count - 3)});
    report.constraints.push_back(
        {"kappa", kappa <= Rational(action_count, 3), Rational(action_count, 3) - kappa});
    report.constraints.push_back({"t_stage", t_stage > 2, Rational(t_stage - 2)});
    if (m_unique) {
        ConstraintCheck m_check;
        m_check.name = "m_unique";
        if (action_count > 3) {
            const Rational bound(t_stage * action_count, action_count - 3);
            m_check.satisfied = Rational(*m_unique) >= bound;
            m_check.margin = Rational(*m_unique) - bound;
        } else {
            m_check.satisfied = false;  // bound diverges at |A| = 3
        }
        report.constraints.push_back(std::move(m_check));
    }
    return report;
}

/**
 * Brute-force oracle for the closed forms: steps the real memory structures
 * over the scenario's state stream (no agent, no environment) and records
 * one exact SizeSample per step, t = 0 .. horizon inclusive.
 */
inline std::vector<SizeSample> trace_synthetic(const ScenarioSpec& spec) {
    spec.validate();
    const std::int64_t horizon =
        spec.kind == ScenarioKind::kReplay ? static_cast<std::int64_t>(spec.stream.size()) - 1
                                           : spec.horizon;

    ShortTermMemory<std::int64_t> stm(spec.action_count);
    LongTermMemory<std::int64_t> ltm;
    std::set<std::int64_t> replay_states;

    std::vector<SizeSample> series;
    series.reserve(static_cast<std::size_t>(horizon) + 1);
    for (std::int64_t t = 0; t <= horizon; ++t) {
        std::int64_t key = 0;
        switch (spec.kind) {
            case ScenarioKind::kWorst: key = t; break;
            case ScenarioKind::kBest: key = t % *spec.m_unique; break;
            case ScenarioKind::kReplay: key = spec.stream[static_cast<std::size_t>(t)]; break;
        }
        if (staging_indicator(t, spec.t_stage)) {
            stage(stm, ltm, spec.kappa, key, t);
        } else {
            stm.observe(key, t);
        }
        replay_states.insert(key);
        series.push_back(make_size_sample(t, stm.state_count(), ltm.state_count(),
                                          static_cast<std::int64_t>(replay_states.size()),
                                          spec.action_count));
    }
    return series;
}

struct SweepRow {
    ScenarioKind scenario = ScenarioKind::kWorst;
    int action_count = 0;
    Rational kappa;
    std::int64_t t_stage = 0;
    std::int64_t n_or_m = 0;  // n for worst, M for best
    Rational zeta1;
    Rational zeta2;
    bool shaded = false;  // zeta2 < 1
};

struct SweepGrid {
    ScenarioKind kind = ScenarioKind::kWorst;
    std::vector<int> action_counts;
    std::vector<Rational> kappas;
    std::vector<std::int64_t> t_stages;
    std::int64_t n_max = 50;  // worst: n = 1 .. n_max
    std::int64_t m_max = 50;  // best:  M = 1 .. m_max
};

/// Evaluates the closed forms over the grid in deterministic grid order and
/// tags rows where the dual memory loses to the replay buffer (zeta2 < 1).
inline std::vector<SweepRow> sweep(const SweepGrid& grid) {
    if (grid.kind == ScenarioKind::kReplay)
        throw std::invalid_argument("sweep covers the worst/best closed forms only");
    if (grid.action_counts.empty() || grid.kappas.empty() || grid.t_stages.empty())
        throw std::invalid_argument("sweep grid must be non-empty");
    const std::int64_t inner_max =
        grid.kind == ScenarioKind::kWorst ? grid.n_max : grid.m_max;
    if (inner_max < 1) throw std::invalid_argument("sweep range must be non-empty");

    std::vector<SweepRow> rows;
    for (int a : grid.action_counts) {
        for (const Rational& kappa : grid.kappas) {
            for (std::int64_t t : grid.t_stages) {
                for (std::int64_t i = 1; i <= inner_max; ++i) {
                    SweepRow row;
                    row.scenario = grid.kind;
                    row.action_count = a;
                    row.kappa = kappa;
                    row.t_stage = t;
                    row.n_or_m = i;
                    const ZetaPair z = grid.kind == ScenarioKind::kWorst
                                           ? zeta_worst(i, a, t, kappa)
                                           : zeta_best(i, a, t);
                    row.zeta1 = z.zeta1;
                    row.zeta2 = z.zeta2;
                    row.shaded = z.zeta2 < Rational(1);
                    rows.push_back(std::move(row));
                }
            }
        }
    }
    return rows;
}

}  // namespace dualmem
