#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "dualmem/cli.hpp"

using namespace dualmem;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("dualmem_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int run_tool(const std::string& args) {
    const std::string cmd = std::string(DUALMEM_TOOL_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("cmd_analyze writes the sweep csv") {
    const fs::path dir = scratch_dir("analyze");
    std::ostringstream diag;

    SECTION("worst-case spot row matches the closed form") {
        AnalyzeOptions opt;
        opt.kind = ScenarioKind::kWorst;
        opt.action_counts = {8};
        opt.kappas = {Rational(1)};
        opt.t_stages = {10};
        opt.n_max = 1;
        opt.out_csv = (dir / "sweep.csv").string();
        REQUIRE(cmd_analyze(opt, diag) == 0);
        CHECK(slurp(dir / "sweep.csv") ==
              "scenario,action_count,kappa_num,kappa_den,t_stage,n_or_M,"
              "zeta1_num,zeta1_den,zeta2_num,zeta2_den,shaded\n"
              "worst,8,1,1,10,1,44,19,1,1,0\n");
    }

    SECTION("best-case boundary has a zeta1 = 1 row") {
        AnalyzeOptions opt;
        opt.kind = ScenarioKind::kBest;
        opt.action_counts = {4};
        opt.kappas = {Rational(1)};
        opt.t_stages = {3};
        opt.m_max = 4;
        opt.out_csv = (dir / "best.csv").string();
        opt.svg_path = (dir / "best.svg").string();
        REQUIRE(cmd_analyze(opt, diag) == 0);
        const std::string csv = slurp(dir / "best.csv");
        CHECK(csv.find("best,4,1,1,3,4,1,1,") != std::string::npos);
        CHECK(slurp(dir / "best.svg").rfind("<svg", 0) == 0);
    }

    SECTION("constraint violations warn but do not abort") {
        AnalyzeOptions opt;
        opt.kind = ScenarioKind::kWorst;
        opt.action_counts = {3};
        opt.kappas = {Rational(1)};
        opt.t_stages = {2};
        opt.n_max = 2;
        opt.out_csv = (dir / "warned.csv").string();
        REQUIRE(cmd_analyze(opt, diag) == 0);
        CHECK(diag.str().find("VIOLATED") != std::string::npos);
        CHECK(fs::exists(dir / "warned.csv"));
    }

    SECTION("missing output path is a usage error") {
        AnalyzeOptions opt;
        opt.out_csv.clear();
        CHECK(cmd_analyze(opt, diag) == 1);
    }

    SECTION("unwritable output path is an io error") {
        AnalyzeOptions opt;
        opt.out_csv = (dir / "no_such_dir" / "sweep.csv").string();
        CHECK(cmd_analyze(opt, diag) == 2);
    }
}

TEST_CASE("cmd_trace emits the full sample series") {
    const fs::path dir = scratch_dir("trace");
    std::ostringstream diag;

    SECTION("worst horizon 10 ends at zeta = 88/38") {
        TraceOptions opt;
        opt.kind = ScenarioKind::kWorst;
        opt.action_count = 8;
        opt.kappa = Rational(1);
        opt.t_stage = 10;
        opt.horizon = 10;
        opt.out_csv = (dir / "w.csv").string();
        REQUIRE(cmd_trace(opt, diag) == 0);
        std::ifstream in(dir / "w.csv");
        const auto series = read_size_samples(in);
        REQUIRE(series.size() == 11);
        CHECK(*series.front().zeta == Rational(1));
        CHECK(*series.back().zeta == Rational(88, 38));
    }

    SECTION("horizon 0 emits the single t = 0 row") {
        TraceOptions opt;
        opt.horizon = 0;
        opt.out_csv = (dir / "h0.csv").string();
        REQUIRE(cmd_trace(opt, diag) == 0);
        std::ifstream in(dir / "h0.csv");
        const auto series = read_size_samples(in);
        REQUIRE(series.size() == 1);
        CHECK(series[0].t == 0);
        CHECK(*series[0].zeta == Rational(1));
    }

    SECTION("negative horizon is a usage error") {
        TraceOptions opt;
        opt.horizon = -1;
        opt.out_csv = (dir / "neg.csv").string();
        CHECK(cmd_trace(opt, diag) == 1);
    }

    SECTION("replay stream file reproduces the hand-computed trace") {
        detail::write_file(dir / "stream.txt", "# five-step fixture\n10\n11\n10\n12\n11\n");
        TraceOptions opt;
        opt.kind = ScenarioKind::kReplay;
        opt.action_count = 4;
        opt.kappa = Rational(1);
        opt.t_stage = 2;
        opt.stream_path = (dir / "stream.txt").string();
        opt.out_csv = (dir / "r.csv").string();
        REQUIRE(cmd_trace(opt, diag) == 0);
        std::ifstream in(dir / "r.csv");
        const auto series = read_size_samples(in);
        REQUIRE(series.size() == 5);
        const std::vector<std::int64_t> want_ms{1, 2, 1, 2, 1};
        const std::vector<std::int64_t> want_ml{0, 0, 1, 1, 3};
        for (std::size_t i = 0; i < 5; ++i) {
            CHECK(series[i].m_s == want_ms[i]);
            CHECK(series[i].m_l == want_ml[i]);
        }
    }

    SECTION("replay error paths") {
        TraceOptions opt;
        opt.kind = ScenarioKind::kReplay;
        opt.out_csv = (dir / "x.csv").string();
        CHECK(cmd_trace(opt, diag) == 1);  // no --stream

        opt.stream_path = (dir / "missing.txt").string();
        CHECK(cmd_trace(opt, diag) == 2);

        detail::write_file(dir / "bad.txt", "10\npotato\n");
        opt.stream_path = (dir / "bad.txt").string();
        CHECK(cmd_trace(opt, diag) == 3);
    }
}

TEST_CASE("cmd_simulate writes deterministic per-intersection series") {
    const fs::path dir = scratch_dir("simulate");
    std::ostringstream diag;

    RunConfig cfg;
    cfg.steps = 120;
    cfg.seed = 5;
    detail::write_file(dir / "run.ini", serialize_config(cfg));

    SimulateOptions opt;
    opt.config_path = (dir / "run.ini").string();
    opt.agent = "dual";
    opt.out_dir = (dir / "out_a").string();
    REQUIRE(cmd_simulate(opt, diag) == 0);
    CHECK(diag.str().find("constraint action_space: satisfied") != std::string::npos);

    SECTION("identical seeds give byte-identical csv files") {
        SimulateOptions again = opt;
        again.out_dir = (dir / "out_b").string();
        REQUIRE(cmd_simulate(again, diag) == 0);
        for (int i = 0; i < 9; ++i) {
            const std::string name = "intersection_" + std::to_string(i) + ".csv";
            CHECK(slurp(dir / "out_a" / name) == slurp(dir / "out_b" / name));
        }
        CHECK(slurp(dir / "out_a" / "mean.csv") == slurp(dir / "out_b" / "mean.csv"));
    }

    SECTION("sarsa runs zero out the dual-memory columns") {
        SimulateOptions sarsa = opt;
        sarsa.agent = "sarsa";
        sarsa.out_dir = (dir / "out_sarsa").string();
        REQUIRE(cmd_simulate(sarsa, diag) == 0);
        std::ifstream in(dir / "out_sarsa" / "intersection_3.csv");
        for (const SizeSample& s : read_size_samples(in)) {
            CHECK(s.m_s == 0);
            CHECK(s.m_l == 0);
            CHECK(s.msize_q == 4 * s.m_q);
        }
    }

    SECTION("DUALMEM_SEED overrides the configured seed") {
        SimulateOptions env_run = opt;
        env_run.out_dir = (dir / "out_env").string();
        setenv("DUALMEM_SEED", "5", 1);
        // config used below says seed 1234, but the env pins it back to 5
        RunConfig other = cfg;
        other.seed = 1234;
        detail::write_file(dir / "other.ini", serialize_config(other));
        env_run.config_path = (dir / "other.ini").string();
        const int rc = cmd_simulate(env_run, diag);
        unsetenv("DUALMEM_SEED");
        REQUIRE(rc == 0);
        CHECK(slurp(dir / "out_env" / "mean.csv") == slurp(dir / "out_a" / "mean.csv"));
    }

    SECTION("seed fan-out writes one directory per seed") {
        SimulateOptions fan = opt;
        fan.seeds = 3;
        fan.steps = 40;
        fan.out_dir = (dir / "out_fan").string();
        REQUIRE(cmd_simulate(fan, diag) == 0);
        CHECK(fs::exists(dir / "out_fan" / "seed_5" / "mean.csv"));
        CHECK(fs::exists(dir / "out_fan" / "seed_6" / "mean.csv"));
        CHECK(fs::exists(dir / "out_fan" / "seed_7" / "mean.csv"));
    }

    SECTION("config errors map to the exit-code contract") {
        SimulateOptions bad = opt;
        bad.config_path = (dir / "nope.ini").string();
        CHECK(cmd_simulate(bad, diag) == 2);

        detail::write_file(dir / "bad.ini", "[grid]\nrows = -2\n");
        bad.config_path = (dir / "bad.ini").string();
        CHECK(cmd_simulate(bad, diag) == 3);

        detail::write_file(dir / "unknown.ini", "[grid]\nwheels = 4\n");
        bad.config_path = (dir / "unknown.ini").string();
        CHECK(cmd_simulate(bad, diag) == 3);

        SimulateOptions usage = opt;
        usage.agent = "q-learning";
        CHECK(cmd_simulate(usage, diag) == 1);
    }
}

TEST_CASE("cmd_report renders the chart") {
    const fs::path dir = scratch_dir("report");
    const fs::path golden = fs::path(DUALMEM_GOLDEN_DIR);
    std::ostringstream diag;

    SECTION("single series yields one polyline with labeled axes") {
        ReportOptions opt;
        opt.inputs = {(golden / "dual.csv").string()};
        opt.out_svg = (dir / "one.svg").string();
        REQUIRE(cmd_report(opt, diag) == 0);
        const std::string svg = slurp(dir / "one.svg");
        std::size_t count = 0;
        for (std::size_t pos = svg.find("<polyline"); pos != std::string::npos;
             pos = svg.find("<polyline", pos + 1)) {
            ++count;
        }
        CHECK(count == 1);
        CHECK(svg.find(">t</text>") != std::string::npos);
        CHECK(svg.find(">entries</text>") != std::string::npos);
    }

    SECTION("dual + sarsa series match the golden chart byte for byte") {
        ReportOptions opt;
        opt.inputs = {(golden / "dual.csv").string(), (golden / "sarsa.csv").string()};
        opt.out_svg = (dir / "two.svg").string();
        REQUIRE(cmd_report(opt, diag) == 0);
        CHECK(slurp(dir / "two.svg") == slurp(golden / "two_series.svg"));
    }

    SECTION("error paths") {
        ReportOptions opt;
        opt.out_svg = (dir / "x.svg").string();
        CHECK(cmd_report(opt, diag) == 1);  // no inputs

        opt.inputs = {(dir / "missing.csv").string()};
        CHECK(cmd_report(opt, diag) == 2);

        detail::write_file(dir / "empty.csv", "");
        opt.inputs = {(dir / "empty.csv").string()};
        CHECK(cmd_report(opt, diag) == 3);

        detail::write_file(dir / "badcol.csv", "t,node,m_s,m_L,m_q,msize_dual,msize_q,zeta_num,zeta_den,zeta_decimal\n0,0,0,0,0,0,0,0,0,0\n");
        opt.inputs = {(dir / "badcol.csv").string()};
        diag.str("");
        CHECK(cmd_report(opt, diag) == 3);
        CHECK(diag.str().find("intersection_id") != std::string::npos);
    }
}

TEST_CASE("binary exit codes follow the contract") {
    const fs::path dir = scratch_dir("binary");

    CHECK(run_tool("") == 1);                       // no subcommand: usage
    CHECK(run_tool("frobnicate") == 1);             // unknown subcommand
    CHECK(run_tool("analyze") == 1);                // missing required flags
    CHECK(run_tool("analyze --scenario worst --kappa nope --out " +
                   (dir / "x.csv").string()) == 1); // malformed rational
    CHECK(run_tool("trace --scenario worst --horizon 5 --out " + (dir / "t.csv").string()) == 0);
    CHECK(run_tool("report --input " + (dir / "absent.csv").string() + " --out " +
                   (dir / "r.svg").string()) == 2);
    CHECK(run_tool("--help") == 0);
}
