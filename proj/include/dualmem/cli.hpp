#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dualmem/analysis.hpp"
#include "dualmem/config.hpp"
#include "dualmem/csv.hpp"
#include "dualmem/errors.hpp"
#include "dualmem/gridsim.hpp"
#include "dualmem/svg.hpp"

namespace dualmem {

namespace detail {

/// splitmix64 over (master, index): one master seed fans out into
/// independent generator seeds for the environment and each agent.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("failed while writing '" + path.string() + "'");
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

template <typename Fn>
int run_guarded(Fn&& fn, std::ostream& diag) {
    try {
        fn();
        return 0;
    } catch (const UsageError& e) {
        diag << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const IoError& e) {
        diag << "io error: " << e.what() << '\n';
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        diag << "io error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        diag << "data error: " << e.what() << '\n';
        return 3;
    }
}

inline void print_constraint_report(const BoundReport& report, std::ostream& diag) {
    for (const auto& c : report.constraints) {
        diag << "constraint " << c.name << ": "
             << (c.satisfied ? "satisfied" : "VIOLATED");
        if (c.margin) diag << " (margin " << format_rational(*c.margin) << ")";
        diag << '\n';
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// analyze: closed-form sweep -> CSV (+ optional SVG)
// ---------------------------------------------------------------------------

struct AnalyzeOptions {
    ScenarioKind kind = ScenarioKind::kWorst;
    std::vector<int> action_counts{8};
    std::vector<Rational> kappas{Rational(1)};
    std::vector<std::int64_t> t_stages{10};
    std::int64_t n_max = 50;  // worst: n = 1..n_max
    std::int64_t m_max = 0;   // best:  M = 1..m_max
    std::string out_csv;
    std::string svg_path;  // empty = no chart
};

inline int cmd_analyze(const AnalyzeOptions& opt, std::ostream& diag = std::cerr) {
    return detail::run_guarded(
        [&] {
            if (opt.kind == ScenarioKind::kReplay)
                throw UsageError("analyze supports --scenario worst|best");
            if (opt.out_csv.empty()) throw UsageError("--out is required");
            if (opt.kind == ScenarioKind::kBest && opt.m_max < 1)
                throw UsageError("--scenario best requires --m >= 1");
            if (opt.kind == ScenarioKind::kWorst && opt.n_max < 1)
                throw UsageError("--n-max must be >= 1");

            SweepGrid grid;
            grid.kind = opt.kind;
            grid.action_counts = opt.action_counts;
            grid.kappas = opt.kappas;
            grid.t_stages = opt.t_stages;
            grid.n_max = opt.n_max;
            grid.m_max = opt.m_max;

            for (int a : grid.action_counts) {
                for (const Rational& k : grid.kappas) {
                    for (std::int64_t t : grid.t_stages) {
                        const BoundReport report = check_constraints(a, k, t);
                        if (!report.all_satisfied()) {
                            diag << "warning: constraints violated at action_count=" << a
                                 << " kappa=" << format_rational(k) << " t_stage=" << t << '\n';
                            detail::print_constraint_report(report, diag);
                        }
                    }
                }
            }

            const std::vector<SweepRow> rows = sweep(grid);
            std::ostringstream csv;
            write_sweep_rows(csv, rows);
            detail::write_file(opt.out_csv, csv.str());

            if (!opt.svg_path.empty()) {
                ChartSpec chart;
                chart.title = opt.kind == ScenarioKind::kWorst
                                  ? "memory comparison ratio, worst-case trajectory"
                                  : "memory comparison ratio, best-case trajectory";
                chart.x_label = opt.kind == ScenarioKind::kWorst ? "n (staging boundaries)"
                                                                 : "M (unique states)";
                chart.y_label = "zeta";
                const std::size_t combo =
                    grid.action_counts.size() * grid.kappas.size() * grid.t_stages.size();
                const std::size_t per = rows.size() / combo;
                for (std::size_t c = 0; c < combo; ++c) {
                    ChartSeries s1, s2;
                    const SweepRow& head = rows[c * per];
                    std::string tag = "A=" + std::to_string(head.action_count) +
                                      " k=" + format_rational(head.kappa) +
                                      " T=" + std::to_string(head.t_stage);
                    s1.label = "zeta1 " + tag;
                    s2.label = "zeta2 " + tag;
                    s2.dashed = true;
                    std::optional<double> band_start;
                    for (std::size_t i = 0; i < per; ++i) {
                        const SweepRow& r = rows[c * per + i];
                        const double x = static_cast<double>(r.n_or_m);
                        s1.points.emplace_back(x, to_double(r.zeta1));
                        s2.points.emplace_back(x, to_double(r.zeta2));
                        if (r.shaded && !band_start) band_start = x;
                        if (!r.shaded && band_start) {
                            chart.bands.push_back({*band_start, x});
                            band_start.reset();
                        }
                    }
                    if (band_start)
                        chart.bands.push_back(
                            {*band_start, static_cast<double>(rows[c * per + per - 1].n_or_m)});
                    chart.series.push_back(std::move(s1));
                    chart.series.push_back(std::move(s2));
                }
                detail::write_file(opt.svg_path, render_chart(chart));
            }
        },
        diag);
}

// ---------------------------------------------------------------------------
// trace: synthetic memory trajectory -> CSV
// ---------------------------------------------------------------------------

struct TraceOptions {
    ScenarioKind kind = ScenarioKind::kWorst;
    int action_count = 8;
    Rational kappa = Rational(1);
    std::int64_t t_stage = 10;
    std::optional<std::int64_t> m_unique;
    std::int64_t horizon = 0;
    std::string stream_path;  // replay scenario: one state key per line
    std::string out_csv;
};

namespace detail {

inline std::vector<std::int64_t> read_stream_file(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    std::vector<std::int64_t> keys;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        try {
            keys.push_back(parse_number<std::int64_t>(t, "stream"));
        } catch (const SchemaError&) {
            throw SchemaError("stream file line " + std::to_string(line_no) +
                              ": expected an integer state key, got '" + t + "'");
        }
    }
    if (keys.empty()) throw SchemaError("stream file has no state keys");
    return keys;
}

}  // namespace detail

inline int cmd_trace(const TraceOptions& opt, std::ostream& diag = std::cerr) {
    return detail::run_guarded(
        [&] {
            if (opt.out_csv.empty()) throw UsageError("--out is required");
            if (opt.horizon < 0) throw UsageError("--horizon must be >= 0");

            ScenarioSpec spec;
            spec.kind = opt.kind;
            spec.action_count = opt.action_count;
            spec.t_stage = opt.t_stage;
            spec.kappa = opt.kappa;
            spec.horizon = opt.horizon;
            if (opt.kind == ScenarioKind::kBest) {
                if (!opt.m_unique) throw UsageError("--scenario best requires --m");
                spec.m_unique = opt.m_unique;
            }
            if (opt.kind == ScenarioKind::kReplay) {
                if (opt.stream_path.empty()) throw UsageError("--scenario replay requires --stream");
                spec.stream = detail::read_stream_file(opt.stream_path);
            }

            const std::vector<SizeSample> series = trace_synthetic(spec);
            std::ostringstream csv;
            write_size_samples(csv, "0", series);
            detail::write_file(opt.out_csv, csv.str());
        },
        diag);
}

// ---------------------------------------------------------------------------
// simulate: grid experiment -> per-intersection CSVs + mean CSV (+ SVG)
// ---------------------------------------------------------------------------

struct SimulateOptions {
    std::string config_path;    // empty = built-in defaults
    std::string agent = "dual"; // dual | sarsa
    std::optional<std::int64_t> steps;
    std::optional<std::uint64_t> seed;
    int seeds = 1;  // fan out over seed, seed+1, ...
    std::string out_dir;
    bool svg = false;
};

namespace detail {

inline void write_experiment_outputs(const ExperimentResult& result,
                                     const std::filesystem::path& dir, bool dual, bool svg) {
    std::filesystem::create_directories(dir);
    for (std::size_t i = 0; i < result.per_intersection.size(); ++i) {
        std::ostringstream csv;
        write_size_samples(csv, std::to_string(i), result.per_intersection[i]);
        write_file(dir / ("intersection_" + std::to_string(i) + ".csv"), csv.str());
    }
    std::ostringstream mean_csv;
    write_mean_samples(mean_csv, result.mean);
    write_file(dir / "mean.csv", mean_csv.str());

    if (svg) {
        ChartSpec chart;
        chart.title = dual ? "dual-memory size per intersection" : "replay-table size per intersection";
        chart.x_label = "t";
        chart.y_label = "entries";
        for (std::size_t i = 0; i < result.per_intersection.size(); ++i) {
            ChartSeries s;
            s.label = "intersection " + std::to_string(i);
            s.staircase = dual;
            for (const SizeSample& sample : result.per_intersection[i]) {
                s.points.emplace_back(static_cast<double>(sample.t),
                                      static_cast<double>(dual ? sample.msize_dual
                                                               : sample.msize_q));
            }
            chart.series.push_back(std::move(s));
        }
        ChartSeries mean_series;
        mean_series.label = "mean";
        mean_series.staircase = dual;
        for (const MeanSample& sample : result.mean) {
            mean_series.points.emplace_back(static_cast<double>(sample.t),
                                            dual ? sample.msize_dual : sample.msize_q);
        }
        chart.series.push_back(std::move(mean_series));
        write_file(dir / "chart.svg", render_chart(chart));
    }
}

}  // namespace detail

inline int cmd_simulate(const SimulateOptions& opt, std::ostream& diag = std::cerr) {
    return detail::run_guarded(
        [&] {
            if (opt.out_dir.empty()) throw UsageError("--out-dir is required");
            if (opt.agent != "dual" && opt.agent != "sarsa")
                throw UsageError("--agent must be dual or sarsa");
            if (opt.seeds < 1) throw UsageError("--seeds must be >= 1");

            RunConfig cfg;
            if (!opt.config_path.empty()) cfg = parse_config(detail::read_file(opt.config_path));
            if (opt.steps) cfg.steps = *opt.steps;
            if (opt.seed) cfg.seed = *opt.seed;
            if (const char* env = std::getenv("DUALMEM_SEED")) {
                try {
                    cfg.seed = detail::parse_number<std::uint64_t>(env, "DUALMEM_SEED");
                } catch (const SchemaError&) {
                    throw UsageError(std::string("DUALMEM_SEED is not an integer: '") + env + "'");
                }
            }

            const HyperParams hp = cfg.hyper_params();
            hp.validate();
            detail::print_constraint_report(check_constraints(hp.action_count, hp.kappa, hp.t_stage),
                                            diag);

            for (int k = 0; k < opt.seeds; ++k) {
                const std::uint64_t run_seed = cfg.seed + static_cast<std::uint64_t>(k);
                const std::filesystem::path dir =
                    opt.seeds == 1 ? std::filesystem::path(opt.out_dir)
                                   : std::filesystem::path(opt.out_dir) /
                                         ("seed_" + std::to_string(run_seed));
                GridNetwork net = cfg.network();
                ExperimentResult result;
                if (opt.agent == "dual") {
                    const SymmetryGroup group = cfg.symmetry_group();
                    std::vector<DualMemoryAgent> agents;
                    agents.reserve(net.cells.size());
                    for (std::size_t i = 0; i < net.cells.size(); ++i) {
                        agents.emplace_back(hp, group, detail::derive_seed(run_seed, i + 1));
                    }
                    result = run_experiment(net, agents, cfg.steps, detail::derive_seed(run_seed, 0));
                } else {
                    std::vector<SarsaAgent> agents;
                    agents.reserve(net.cells.size());
                    for (std::size_t i = 0; i < net.cells.size(); ++i) {
                        agents.emplace_back(hp, detail::derive_seed(run_seed, i + 1));
                    }
                    result = run_experiment(net, agents, cfg.steps, detail::derive_seed(run_seed, 0));
                }
                detail::write_experiment_outputs(result, dir, opt.agent == "dual", opt.svg);
                diag << "seed " << run_seed << ": wrote " << result.per_intersection.size()
                     << " intersection series + mean to " << dir.string() << '\n';
            }
        },
        diag);
}

// ---------------------------------------------------------------------------
// report: SizeSample CSVs -> SVG line chart
// ---------------------------------------------------------------------------

struct ReportOptions {
    std::vector<std::string> inputs;
    std::string out_svg;
};

inline int cmd_report(const ReportOptions& opt, std::ostream& diag = std::cerr) {
    return detail::run_guarded(
        [&] {
            if (opt.inputs.empty()) throw UsageError("at least one --input csv is required");
            if (opt.out_svg.empty()) throw UsageError("--out is required");

            ChartSpec chart;
            chart.title = "memory size over time";
            chart.x_label = "t";
            chart.y_label = "entries";
            for (const std::string& input : opt.inputs) {
                const std::string text = detail::read_file(input);
                std::istringstream in(text);
                const SeriesTable table = read_series_table(in);
                bool dual = false;
                for (double v : table.m_l) {
                    if (v > 0) {
                        dual = true;
                        break;
                    }
                }
                ChartSeries s;
                s.label = std::filesystem::path(input).stem().string() +
                          (dual ? " (dual)" : " (sarsa)");
                s.staircase = dual;
                for (std::size_t i = 0; i < table.t.size(); ++i) {
                    s.points.emplace_back(table.t[i], dual ? table.msize_dual[i] : table.msize_q[i]);
                }
                chart.series.push_back(std::move(s));
            }
            detail::write_file(opt.out_svg, render_chart(chart));
        },
        diag);
}

}  // namespace dualmem
