#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "dualmem/cli.hpp"
#include "dualmem/errors.hpp"
#include "dualmem/rational.hpp"

namespace {

dualmem::ScenarioKind parse_scenario(const std::string& name, bool allow_replay) {
    if (name == "worst") return dualmem::ScenarioKind::kWorst;
    if (name == "best") return dualmem::ScenarioKind::kBest;
    if (name == "replay" && allow_replay) return dualmem::ScenarioKind::kReplay;
    throw dualmem::UsageError("unknown scenario '" + name + "'");
}

std::vector<int> parse_int_list(const std::string& text, const char* flag) {
    std::vector<int> out;
    for (const auto& part : dualmem::detail::split(text, ',')) {
        try {
            out.push_back(dualmem::detail::parse_number<int>(dualmem::detail::trim(part), flag));
        } catch (const std::exception& e) {
            throw dualmem::UsageError(e.what());
        }
    }
    return out;
}

std::vector<std::int64_t> parse_int64_list(const std::string& text, const char* flag) {
    std::vector<std::int64_t> out;
    for (const auto& part : dualmem::detail::split(text, ',')) {
        try {
            out.push_back(
                dualmem::detail::parse_number<std::int64_t>(dualmem::detail::trim(part), flag));
        } catch (const std::exception& e) {
            throw dualmem::UsageError(e.what());
        }
    }
    return out;
}

std::vector<dualmem::Rational> parse_rational_list(const std::string& text) {
    std::vector<dualmem::Rational> out;
    for (const auto& part : dualmem::detail::split(text, ',')) {
        try {
            out.push_back(dualmem::parse_rational(dualmem::detail::trim(part)));
        } catch (const std::exception& e) {
            throw dualmem::UsageError(e.what());
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dualmem: dual-memory tabular RL toolkit"};
    app.require_subcommand(1);

    // analyze
    auto* analyze = app.add_subcommand("analyze", "sweep the closed-form memory bounds");
    std::string an_scenario;
    std::string an_actions = "8", an_kappas = "1", an_tstages = "10";
    std::int64_t an_n_max = 50, an_m_max = 0;
    std::string an_out, an_svg;
    analyze->add_option("--scenario", an_scenario, "worst|best")->required();
    analyze->add_option("--action-size", an_actions, "action space sizes, comma separated");
    analyze->add_option("--kappa", an_kappas, "staging ratios (p/q), comma separated");
    analyze->add_option("--t-stage", an_tstages, "staging periods, comma separated");
    analyze->add_option("--n-max", an_n_max, "worst case: sweep n = 1..n-max");
    analyze->add_option("--m", an_m_max, "best case: sweep M = 1..m");
    analyze->add_option("--out", an_out, "output CSV path")->required();
    analyze->add_option("--svg", an_svg, "also render the sweep chart to this path");

    // trace
    auto* trace = app.add_subcommand("trace", "run the synthetic memory trajectory");
    std::string tr_scenario;
    int tr_action = 8;
    std::string tr_kappa = "1";
    std::int64_t tr_tstage = 10, tr_horizon = 0;
    std::int64_t tr_m = 0;
    std::string tr_stream, tr_out;
    trace->add_option("--scenario", tr_scenario, "worst|best|replay")->required();
    trace->add_option("--action-size", tr_action, "action space size");
    trace->add_option("--kappa", tr_kappa, "staging ratio (p/q)");
    trace->add_option("--t-stage", tr_tstage, "staging period");
    trace->add_option("--m", tr_m, "best case: number of unique states M");
    trace->add_option("--horizon", tr_horizon, "last step to trace (t = 0..horizon)");
    trace->add_option("--stream", tr_stream, "replay case: file with one state key per line");
    trace->add_option("--out", tr_out, "output CSV path")->required();

    // simulate
    auto* simulate = app.add_subcommand("simulate", "run the grid traffic experiment");
    dualmem::SimulateOptions sim;
    std::int64_t sim_steps = -1;
    std::int64_t sim_seed = -1;
    simulate->add_option("--config", sim.config_path, "run configuration file");
    simulate->add_option("--agent", sim.agent, "dual|sarsa");
    simulate->add_option("--steps", sim_steps, "override [grid] steps")
        ->check(CLI::NonNegativeNumber);
    simulate->add_option("--seed", sim_seed, "override [grid] seed (DUALMEM_SEED wins)")
        ->check(CLI::NonNegativeNumber);
    simulate->add_option("--seeds", sim.seeds, "fan out over this many consecutive seeds")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--out-dir", sim.out_dir, "output directory")->required();
    simulate->add_flag("--svg", sim.svg, "also render chart.svg per run");

    // report
    auto* report = app.add_subcommand("report", "render SizeSample CSVs as an SVG chart");
    dualmem::ReportOptions rep;
    report->add_option("--input", rep.inputs, "input CSV (repeatable)")->required();
    report->add_option("--out", rep.out_svg, "output SVG path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*analyze) {
            dualmem::AnalyzeOptions opt;
            opt.kind = parse_scenario(an_scenario, false);
            opt.action_counts = parse_int_list(an_actions, "--action-size");
            opt.kappas = parse_rational_list(an_kappas);
            opt.t_stages = parse_int64_list(an_tstages, "--t-stage");
            opt.n_max = an_n_max;
            opt.m_max = an_m_max;
            opt.out_csv = an_out;
            opt.svg_path = an_svg;
            return dualmem::cmd_analyze(opt, std::cerr);
        }
        if (*trace) {
            dualmem::TraceOptions opt;
            opt.kind = parse_scenario(tr_scenario, true);
            opt.action_count = tr_action;
            opt.kappa = dualmem::parse_rational(tr_kappa);
            opt.t_stage = tr_tstage;
            if (tr_m > 0) opt.m_unique = tr_m;
            opt.horizon = tr_horizon;
            opt.stream_path = tr_stream;
            opt.out_csv = tr_out;
            return dualmem::cmd_trace(opt, std::cerr);
        }
        if (*simulate) {
            if (sim_steps >= 0) sim.steps = sim_steps;
            if (sim_seed >= 0) sim.seed = static_cast<std::uint64_t>(sim_seed);
            return dualmem::cmd_simulate(sim, std::cout);
        }
        if (*report) {
            return dualmem::cmd_report(rep, std::cerr);
        }
    } catch (const dualmem::UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    }
    return 1;
}
