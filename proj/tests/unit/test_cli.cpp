#include "cli.hpp"
#include "dcor/code_io.hpp"
#include "dcor/objective.hpp"
#include "support/oracle.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "dcor");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = dcor::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

json read_json(const fs::path& p) {
    std::ifstream f(p);
    return json::parse(f);
}

std::vector<json> read_lines(const fs::path& p) {
    std::ifstream f(p);
    std::vector<json> lines;
    for (std::string line; std::getline(f, line);) lines.push_back(json::parse(line));
    return lines;
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("dcor_cli_" + std::string(
                                                 ::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

} // namespace

TEST_F(CliTest, TinyGreedyReachesLocalOptimum) {
    const auto r = run({"optimize", "--n", "2", "--length", "4", "--p", "2", "--strategy", "greedy", "--seed", "7",
                        "--out", path("run")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto summary = read_json(dir_ / "run" / "summary.json");
    EXPECT_EQ(summary["termination"], "local_optimum");
    const auto x = dcor::load_codes(dir_ / "run" / "codes.csv");
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 4; ++b) EXPECT_GE(oracle::delta(x, {a, b}, 2), -1e-12L);
}

TEST_F(CliTest, SummaryMatchesEvaluation) {
    for (const char* format : {"csv", "prn"}) {
        const std::string out = path(std::string("run_") + format);
        const auto r = run({"optimize", "--n", "4", "--length", "31", "--strategy", "fixed", "--search-size", "10",
                            "--seed", "3", "--max-iters", "300", "--format", format, "--out", out});
        ASSERT_EQ(r.code, 0) << r.err;
        const auto summary = read_json(fs::path(out) / "summary.json");
        const auto codes = fs::path(out) / summary["codes_file"].get<std::string>();
        const auto e = run({"evaluate", codes.string()});
        ASSERT_EQ(e.code, 0) << e.err;
        const auto report = json::parse(e.out);
        EXPECT_EQ(report["objective"], summary["final_objective"]);
        for (const char* key : {"max_abs", "mean", "std", "count"})
            EXPECT_EQ(report["stats"][key], summary["stats"][key]) << key;
        const auto& s = summary;
        EXPECT_NEAR(s["percent_improvement"].get<double>(),
                    100 * (s["initial_objective"].get<double>() - s["final_objective"].get<double>()) /
                        s["initial_objective"].get<double>(),
                    1e-9);
        EXPECT_EQ(s["config"]["search_size"], 10);
        EXPECT_EQ(s["rng"]["seed"], 3);
    }
}

TEST_F(CliTest, TraceIsLineDelimited) {
    const auto r = run({"optimize", "--n", "3", "--length", "15", "--seed", "5", "--max-iters", "2500", "--out",
                        path("run")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto lines = read_lines(dir_ / "run" / "trace.jsonl");
    ASSERT_GE(lines.size(), 2u);
    EXPECT_EQ(lines[0]["type"], "header");
    EXPECT_TRUE(lines[0]["rng"].contains("algorithm"));
    double prev = INFINITY;
    std::uint64_t prev_k = 0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto& rec = lines[i];
        for (const char* key : {"k", "t_wall_s", "M", "a", "b", "delta", "accepted", "objective"})
            ASSERT_TRUE(rec.contains(key)) << key;
        EXPECT_GT(rec["k"].get<std::uint64_t>(), prev_k);
        prev_k = rec["k"];
        EXPECT_LE(rec["objective"].get<double>(), prev);
        prev = rec["objective"];
        if (!rec["accepted"].get<bool>()) EXPECT_EQ(rec["k"].get<std::uint64_t>() % 1000, 0u);
    }
}

TEST_F(CliTest, MultiStartReportsRestarts) {
    const auto r = run({"optimize", "--n", "3", "--length", "16", "--restarts", "3", "--max-iters", "200", "--out",
                        path("run")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto s = read_json(dir_ / "run" / "summary.json");
    ASSERT_EQ(s["restart_summaries"].size(), 3u);
    EXPECT_EQ(s["final_objective"], s["min_final_objective"]);
    EXPECT_EQ(s["rng"]["restart_seeds"].size(), 3u);
    const auto lines = read_lines(dir_ / "run" / "trace.jsonl");
    EXPECT_TRUE(lines.back().contains("restart"));
}

TEST_F(CliTest, ConstrainedRunsRecordPairs) {
    const auto r = run({"optimize", "--n", "3", "--length", "16", "--balanced", "--acz", "--max-iters", "200",
                        "--out", path("run")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto s = read_json(dir_ / "run" / "summary.json");
    EXPECT_TRUE(s["constraints"]["all_ok"].get<bool>());
    const auto lines = read_lines(dir_ / "run" / "trace.jsonl");
    ASSERT_GE(lines.size(), 2u);
    EXPECT_TRUE(lines[1].contains("b2"));
}

TEST_F(CliTest, PresetRunImproves) {
    const auto r = run({"optimize", "--preset", "gps-l1ca", "--p", "6", "--strategy", "adaptive", "--seed", "1",
                        "--time-limit", "3", "--out", path("run")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto s = read_json(dir_ / "run" / "summary.json");
    EXPECT_EQ(s["config"]["n"], 63);
    EXPECT_EQ(s["config"]["length"], 1023);
    EXPECT_GT(s["percent_improvement"].get<double>(), 0.0);
    EXPECT_EQ(s["termination"], "time_limit");
}

TEST_F(CliTest, ExitCodes) {
    EXPECT_EQ(run({"optimize", "--preset", "gps-l1ca", "--balanced", "--out", path("a")}).code, 2);
    EXPECT_EQ(run({"optimize", "--n", "2", "--length", "10", "--acz", "--out", path("a")}).code, 2);
    EXPECT_EQ(run({}).code, 1);
    EXPECT_EQ(run({"optimize"}).code, 1);
    EXPECT_EQ(run({"optimize", "--preset", "nope"}).code, 1);
    EXPECT_EQ(run({"optimize", "--preset", "gps-l1ca", "--n", "3"}).code, 1);
    EXPECT_EQ(run({"optimize", "--n", "3"}).code, 1);
    EXPECT_EQ(run({"optimize", "--n", "2", "--length", "8", "--p", "0.5", "--out", path("a")}).code, 1);
    EXPECT_EQ(run({"optimize", "--n", "2", "--length", "8", "--strategy", "greedy", "--search-size", "4"}).code, 1);
    EXPECT_EQ(run({"optimize", "--n", "2", "--length", "8", "--strategy", "fixed", "--search-size", "17", "--out",
                   path("a")})
                  .code,
              1);
    EXPECT_EQ(run({"optimize", "--n", "2", "--length", "8", "--strategy", "tabu"}).code, 1);
    EXPECT_EQ(run({"optimize", "--n", "2", "--length", "8", "--format", "txt"}).code, 1);
    EXPECT_EQ(run({"evaluate", path("missing.csv")}).code, 1);
    EXPECT_EQ(run({"benchmark", "--suite", "m-sweep"}).code, 1);
    EXPECT_EQ(run({"benchmark", "--suite", "nope", "--budget", "1"}).code, 1);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, EvaluateShiftedPair) {
    std::ofstream(path("pair.csv")) << "1,1,1,-1\n1,-1,1,1\n";
    const auto r = run({"evaluate", path("pair.csv"), "--p", "6"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_DOUBLE_EQ(j["objective"].get<double>(), 1.0);
    EXPECT_DOUBLE_EQ(j["stats"]["max_abs"].get<double>(), 1.0);
    EXPECT_EQ(j["stats"]["count"], 10);
    EXPECT_EQ(j["stats"]["histogram"]["counts"].size(), 201u);
    EXPECT_EQ(j["constraints"]["codes"].size(), 2u);
}

TEST_F(CliTest, EvaluateConstantCode) {
    std::ofstream(path("ones.csv")) << "1,1,1,1,1\n";
    const auto r = run({"evaluate", path("ones.csv"), "--out", path("report.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = read_json(dir_ / "report.json");
    EXPECT_DOUBLE_EQ(j["stats"]["max_abs"].get<double>(), 1.0);
    EXPECT_EQ(j["stats"]["count"], 4);
    EXPECT_DOUBLE_EQ(j["objective"].get<double>(), 4.0);
}

TEST_F(CliTest, EvaluateRejectsMalformedFile) {
    std::ofstream(path("bad.csv")) << "1,0,1\n";
    EXPECT_EQ(run({"evaluate", path("bad.csv")}).code, 1);
}

TEST_F(CliTest, BenchmarkIsReproducibleWithIterationBudget) {
    auto strip = [](json j) {
        for (auto& row : j["runs"]) {
            row.erase("wall_s");
            row.erase("series");
        }
        return j;
    };
    for (const char* suite : {"strategy-comparison", "p-sweep"}) {
        const std::vector<std::string> args = {"benchmark", "--suite", suite, "--n", "4", "--length", "31",
                                               "--max-iters", "60", "--seed", "2"};
        auto a = args;
        a.insert(a.end(), {"--out", path("a")});
        auto b = args;
        b.insert(b.end(), {"--out", path("b")});
        ASSERT_EQ(run(a).code, 0);
        ASSERT_EQ(run(b).code, 0);
        const std::string file = std::string(suite) + ".json";
        const auto ja = read_json(dir_ / "a" / file);
        EXPECT_EQ(strip(ja), strip(read_json(dir_ / "b" / file)));
        if (std::string(suite) == "strategy-comparison")
            for (const auto& row : ja["runs"])
                    EXPECT_EQ(row["initial_objective"], ja["runs"][0]["initial_objective"]) << "shared initialization";
    }
}

TEST_F(CliTest, MSweepEmitsOnePairPerGridPoint) {
    const auto r = run({"benchmark", "--suite", "m-sweep", "--preset", "gps-l1ca", "--grid", "1,10,100,1000",
                        "--max-iters", "3", "--out", path("m")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = read_json(dir_ / "m" / "m-sweep.json");
    ASSERT_EQ(j["runs"].size(), 4u);
    const std::size_t grid[] = {1, 10, 100, 1000};
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(j["runs"][i]["M"], grid[i]);
        EXPECT_TRUE(j["runs"][i]["final_objective"].is_number());
    }
}

TEST_F(CliTest, PSweepEmitsDistributionData) {
    const auto r = run({"benchmark", "--suite", "p-sweep", "--n", "3", "--length", "15", "--max-iters", "100",
                        "--out", path("p")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = read_json(dir_ / "p" / "p-sweep.json");
    ASSERT_EQ(j["runs"].size(), 3u);
    for (const auto& row : j["runs"]) {
        EXPECT_EQ(row["quartiles"].size(), 5u);
        EXPECT_EQ(row["stats"]["histogram"]["counts"].size(), 201u);
    }
}

TEST_F(CliTest, BenchmarkBudgetTooSmall) {
    const auto r = run({"benchmark", "--suite", "strategy-comparison", "--budget", "0"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("budget too small"), std::string::npos);
}
