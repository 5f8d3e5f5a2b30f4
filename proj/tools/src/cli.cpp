#include "cli.hpp"

#include "presets.hpp"
#include "report.hpp"
#include "suites.hpp"
#include "trace_writer.hpp"

#include "dcor/code_io.hpp"
#include "dcor/error.hpp"
#include "dcor/optimizer.hpp"

#include <CLI11.hpp>
#include <tbb/global_control.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace dcor::cli {

namespace fs = std::filesystem;

namespace {

std::atomic<bool> g_stop{false};

struct SizeOptions {
    std::string preset;
    std::size_t codes = 0;
    std::size_t length = 0;
    CLI::Option* preset_opt = nullptr;
    CLI::Option* codes_opt = nullptr;
    CLI::Option* length_opt = nullptr;

    void add_to(CLI::App& app, bool required) {
        std::string names;
        for (const auto& p : kPresets) names += (names.empty() ? "" : ", ") + std::string(p.name);
        preset_opt = app.add_option("--preset", preset, "Problem size preset: " + names);
        codes_opt = app.add_option("--n", codes, "Number of codes")->check(CLI::PositiveNumber);
        length_opt = app.add_option("--length", length, "Code length in chips")->check(CLI::Range(2u, 1u << 30));
        preset_opt->excludes(codes_opt)->excludes(length_opt);
        codes_opt->needs(length_opt);
        length_opt->needs(codes_opt);
        required_ = required;
    }

    // Resolves the family size; false when none was given and none is required.
    bool resolve() {
        if (*preset_opt) {
            const auto p = find_preset(preset);
            if (!p) throw InvalidArgument("unknown preset '" + preset + "'");
            codes = p->codes;
            length = p->length;
            return true;
        }
        if (*codes_opt) return true;
        if (required_) throw InvalidArgument("give either --preset or both --n and --length");
        return false;
    }

private:
    bool required_ = true;
};

struct OptimizeArgs {
    SizeOptions size;
    double p = 6.0;
    std::string strategy = "adaptive";
    std::size_t search_size = 100;
    CLI::Option* search_size_opt = nullptr;
    std::uint64_t seed = 1;
    std::size_t restarts = 1;
    std::uint64_t max_iters = 0;
    CLI::Option* max_iters_opt = nullptr;
    double time_limit = 0;
    CLI::Option* time_limit_opt = nullptr;
    std::uint64_t stall_limit = 0;
    CLI::Option* stall_limit_opt = nullptr;
    bool balanced = false;
    bool acz = false;
    std::string out = ".";
    std::string format = "csv";
};

struct EvaluateArgs {
    std::string file;
    double p = 6.0;
    std::string out;
};

struct BenchmarkArgs {
    SizeOptions size;
    std::string suite;
    double budget = 0;
    CLI::Option* budget_opt = nullptr;
    std::uint64_t max_iters = 0;
    CLI::Option* max_iters_opt = nullptr;
    double p = 6.0;
    std::uint64_t seed = 1;
    std::vector<std::size_t> grid{1, 10, 100, 1000};
    std::vector<double> p_values{2.0, 4.0, 6.0};
    std::string out;
};

SearchStrategy parse_strategy(const OptimizeArgs& a) {
    if (a.strategy == "greedy" || a.strategy == "adaptive") {
        if (*a.search_size_opt) throw InvalidArgument("--search-size only applies to --strategy fixed");
        return a.strategy == "greedy" ? SearchStrategy::greedy() : SearchStrategy::adaptive();
    }
    return SearchStrategy::fixed(a.search_size);
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream f(path);
    f << j.dump(2) << '\n';
    if (!f) throw std::runtime_error("cannot write " + path.string());
}

int cmd_optimize(OptimizeArgs& a, std::ostream& out) {
    a.size.resolve();
    const std::size_t n = a.size.codes;
    const std::size_t len = a.size.length;
    const auto strategy = parse_strategy(a);
    const auto format = parse_code_format(a.format);

    RunConfig cfg;
    cfg.objective.p = a.p;
    cfg.objective.validate();
    cfg.seed = a.seed;
    cfg.constraints = {a.balanced, a.acz};
    validate_constraints(cfg.constraints, len);
    if (*a.max_iters_opt) cfg.max_iterations = a.max_iters;
    if (*a.time_limit_opt) cfg.time_limit_s = a.time_limit;
    if (*a.stall_limit_opt) cfg.stall_limit = a.stall_limit;

    const fs::path dir(a.out);
    fs::create_directories(dir);
    TraceWriter trace(dir / "trace.jsonl");

    json config = {{"preset", a.size.preset.empty() ? json(nullptr) : json(a.size.preset)},
                   {"n", n},
                   {"length", len},
                   {"p", a.p},
                   {"strategy", a.strategy},
                   {"search_size", strategy.kind == SearchStrategy::Kind::Fixed ? json(a.search_size) : json(nullptr)},
                   {"seed", a.seed},
                   {"restarts", a.restarts},
                   {"max_iters", cfg.max_iterations ? json(*cfg.max_iterations) : json(nullptr)},
                   {"time_limit_s", cfg.time_limit_s ? json(*cfg.time_limit_s) : json(nullptr)},
                   {"stall_limit", cfg.stall_limit ? json(*cfg.stall_limit) : json(nullptr)},
                   {"balanced", a.balanced},
                   {"acz", a.acz},
                   {"format", a.format}};
    const json rng = rng_json(a.seed, a.restarts);
    trace.write({{"type", "header"}, {"config", config}, {"rng", rng}});

    const bool multi = a.restarts > 1;
    auto hooks_for = [&](std::size_t restart) {
        RunHooks hooks;
        hooks.on_record = [&trace, restart, multi](const TraceRecord& r) {
            trace.write(record_json(r, multi ? std::optional<std::size_t>(restart) : std::nullopt));
        };
        hooks.on_iteration = [](const IterationState&) { return !g_stop.load(std::memory_order_relaxed); };
        return hooks;
    };

    std::optional<MultiStartResult> ms;
    RunResult result = [&] {
        if (!multi) return descend(initial_family(n, len, cfg.constraints, a.seed), strategy, cfg, hooks_for(0));
        ms = multi_start(n, len, strategy, cfg, a.restarts, hooks_for);
        return std::move(ms->best);
    }();

    const std::string codes_name = "codes." + std::string(extension(*format));
    save_codes(dir / codes_name, result.codes, *format);

    const auto& s = result.trace.summary;
    json summary = {{"config", config}};
    summary.update(summary_json(s));
    summary["stats"] = stats_json(correlation_stats(result.correlations), false);
    summary["constraints"] = constraint_json(check_constraints(result.codes, cfg.constraints), cfg.constraints);
    summary["rng"] = rng;
    summary["codes_file"] = codes_name;
    summary["trace_file"] = "trace.jsonl";
    if (ms) {
        summary["best_restart"] = ms->best_restart;
        summary["min_final_objective"] = ms->min_final;
        summary["max_final_objective"] = ms->max_final;
        json per = json::array();
        for (const auto& r : ms->restarts) per.push_back(summary_json(r));
        summary["restart_summaries"] = std::move(per);
    }
    write_json(dir / "summary.json", summary);

    char line[256];
    std::snprintf(line, sizeof line, "objective %.9g -> %.9g (%.3f%% improvement), %llu iterations, %s\n",
                  s.initial_objective, s.final_objective, s.percent_improvement,
                  static_cast<unsigned long long>(s.iterations), std::string(to_string(s.termination)).c_str());
    out << line << "wrote " << (dir / codes_name).string() << ", trace.jsonl, summary.json\n";
    return kExitOk;
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
    ObjectiveSpec spec{a.p};
    spec.validate();
    const auto report = evaluate_json(load_codes(a.file), spec);
    if (!a.out.empty())
        write_json(a.out, report);
    else
        out << report.dump(2) << '\n';
    return kExitOk;
}

int cmd_benchmark(BenchmarkArgs& a, std::ostream& out, std::ostream& err) {
    const auto suite = parse_suite(a.suite);
    SuiteOptions o;
    if (a.size.resolve()) {
        o.codes = a.size.codes;
        o.length = a.size.length;
    }
    ObjectiveSpec{a.p}.validate();
    for (double p : a.p_values) ObjectiveSpec{p}.validate();
    o.p = a.p;
    o.seed = a.seed;
    if (*a.budget_opt) o.budget_s = a.budget;
    if (*a.max_iters_opt) o.max_iterations = a.max_iters;
    o.m_grid = a.grid;
    o.p_values = a.p_values;

    const auto result = run_suite(*suite, o, [&](const SuiteRun& run) {
        err << "finished " << run.label << " (" << run.result.trace.summary.iterations << " iterations)\n";
    });
    print_suite_table(out, result);
    if (!a.out.empty()) {
        const fs::path dir(a.out);
        fs::create_directories(dir);
        const fs::path file = dir / (std::string(suite_name(*suite)) + ".json");
        write_json(file, suite_json(result));
        out << "wrote " << file.string() << '\n';
    }
    return kExitOk;
}

} // namespace

void request_stop() noexcept { g_stop.store(true, std::memory_order_relaxed); }

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spreading-code family optimizer", "dcor"};
    app.require_subcommand(1);
    std::size_t threads = 0;
    app.add_option("--threads", threads, "Worker threads (default: all cores)")->check(CLI::PositiveNumber);

    OptimizeArgs opt;
    auto* optimize = app.add_subcommand("optimize", "Optimize a code family by bit-flip descent");
    opt.size.add_to(*optimize, true);
    optimize->add_option("--p", opt.p, "Objective exponent (>= 1)")->capture_default_str();
    optimize->add_option("--strategy", opt.strategy, "Search strategy")
        ->check(CLI::IsMember({"greedy", "fixed", "adaptive"}))
        ->capture_default_str();
    opt.search_size_opt = optimize->add_option("--search-size", opt.search_size, "Candidates per iteration (fixed)")
                              ->check(CLI::PositiveNumber)
                              ->capture_default_str();
    optimize->add_option("--seed", opt.seed, "Master seed")->capture_default_str();
    optimize->add_option("--restarts", opt.restarts, "Independent random starts; the best is kept")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    opt.max_iters_opt = optimize->add_option("--max-iters", opt.max_iters, "Iteration limit per restart");
    opt.time_limit_opt = optimize->add_option("--time-limit", opt.time_limit, "Wall-clock seconds per restart")
                             ->check(CLI::NonNegativeNumber);
    opt.stall_limit_opt = optimize->add_option("--stall-limit", opt.stall_limit,
                                               "Consecutive non-improving iterations before stopping");
    optimize->add_flag("--balanced", opt.balanced, "Keep every code balanced");
    optimize->add_flag("--acz", opt.acz, "Keep the shift-1 autocorrelation sidelobe at zero");
    optimize->add_option("--out", opt.out, "Output directory")->capture_default_str();
    optimize->add_option("--format", opt.format, "Code file format")
        ->check(CLI::IsMember({"csv", "prn"}))
        ->capture_default_str();

    EvaluateArgs ev;
    auto* evaluate = app.add_subcommand("evaluate", "Report objective and correlation statistics of a code file");
    evaluate->add_option("file", ev.file, "Code file (.csv or .prn)")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--p", ev.p, "Objective exponent (>= 1)")->capture_default_str();
    evaluate->add_option("--out", ev.out, "Write the JSON report here instead of stdout");

    BenchmarkArgs bm;
    auto* benchmark = app.add_subcommand("benchmark", "Run an experiment suite from one shared initialization");
    benchmark->add_option("--suite", bm.suite, "Suite to run")
        ->required()
        ->check(CLI::IsMember({"strategy-comparison", "m-sweep", "p-sweep"}));
    bm.budget_opt = benchmark->add_option("--budget", bm.budget, "Wall-clock seconds per run")
                        ->check(CLI::NonNegativeNumber);
    bm.max_iters_opt = benchmark->add_option("--max-iters", bm.max_iters, "Iteration limit per run");
    bm.size.add_to(*benchmark, false);
    benchmark->add_option("--p", bm.p, "Objective exponent (strategy-comparison, m-sweep)")->capture_default_str();
    benchmark->add_option("--seed", bm.seed, "Seed of the shared initialization and searches")->capture_default_str();
    benchmark->add_option("--grid", bm.grid, "Search sizes of the m-sweep")->delimiter(',')->capture_default_str();
    benchmark->add_option("--p-values", bm.p_values, "Exponents of the p-sweep")
        ->delimiter(',')
        ->capture_default_str();
    benchmark->add_option("--out", bm.out, "Directory for the JSON results");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    }

    std::unique_ptr<tbb::global_control> limit;
    if (threads) limit = std::make_unique<tbb::global_control>(tbb::global_control::max_allowed_parallelism, threads);
    g_stop.store(false);

    try {
        if (*optimize) return cmd_optimize(opt, out);
        if (*evaluate) return cmd_evaluate(ev, out);
        if (!*bm.budget_opt && !*bm.max_iters_opt) throw InvalidArgument("benchmark needs --budget or --max-iters");
        return cmd_benchmark(bm, out, err);
    } catch (const InfeasibleError& e) {
        err << "infeasible configuration: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const BudgetError& e) {
        err << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

} // namespace dcor::cli
