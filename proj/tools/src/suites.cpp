#include "suites.hpp"

#include "report.hpp"
#include "dcor/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace dcor::cli {

namespace {

constexpr std::size_t kMaxSeriesPoints = 1000;

RunConfig base_config(const SuiteOptions& o, double p) {
    RunConfig c;
    c.seed = o.seed;
    c.objective.p = p;
    c.max_iterations = o.max_iterations;
    c.time_limit_s = o.budget_s;
    return c;
}

SuiteRun run_one(std::string label, const CodeMatrix& x0, const SearchStrategy& strategy, const SuiteOptions& o,
                 double p) {
    auto cfg = base_config(o, p);
    if (strategy.kind == SearchStrategy::Kind::Fixed) cfg.stall_limit = std::numeric_limits<std::uint64_t>::max();
    SuiteRun run{std::move(label), strategy, p, descend(x0, strategy, cfg)};
    if (run.result.trace.summary.iterations == 0)
        throw BudgetError("budget too small: run '" + run.label + "' did not complete a single iteration");
    return run;
}

// Objective against wall time at accepted flips, thinned to a bounded number
// of points. The first and last points are always kept.
nlohmann::json objective_series(const RunTrace& trace) {
    std::vector<const TraceRecord*> accepted;
    for (const auto& r : trace.records)
        if (r.accepted) accepted.push_back(&r);
    auto series = nlohmann::json::array();
    series.push_back({0.0, trace.summary.initial_objective});
    const std::size_t stride = accepted.size() / kMaxSeriesPoints + 1;
    for (std::size_t i = 0; i < accepted.size(); ++i)
        if (i % stride == 0 || i + 1 == accepted.size())
            series.push_back({accepted[i]->wall_s, accepted[i]->objective});
    series.push_back({trace.summary.wall_s, trace.summary.final_objective});
    return series;
}

} // namespace

std::optional<Suite> parse_suite(std::string_view name) {
    if (name == "strategy-comparison") return Suite::StrategyComparison;
    if (name == "m-sweep") return Suite::MSweep;
    if (name == "p-sweep") return Suite::PSweep;
    return std::nullopt;
}

std::string_view suite_name(Suite suite) {
    switch (suite) {
    case Suite::StrategyComparison: return "strategy-comparison";
    case Suite::MSweep: return "m-sweep";
    case Suite::PSweep: return "p-sweep";
    }
    return "unknown";
}

SuiteResult run_suite(Suite suite, const SuiteOptions& options, const std::function<void(const SuiteRun&)>& on_run) {
    if (!options.budget_s && !options.max_iterations)
        throw InvalidArgument("a benchmark suite needs a time budget or an iteration budget");
    SuiteResult result{suite, options, {}};
    const auto x0 = random_code_matrix(options.codes, options.length, options.seed);
    const std::size_t universe = options.codes * options.length;

    auto add = [&](SuiteRun run) {
        if (on_run) on_run(run);
        result.runs.push_back(std::move(run));
    };

    switch (suite) {
    case Suite::StrategyComparison:
        add(run_one("adaptive", x0, SearchStrategy::adaptive(), options, options.p));
        add(run_one("greedy", x0, SearchStrategy::greedy(), options, options.p));
        add(run_one("fixed M=1", x0, SearchStrategy::fixed(1), options, options.p));
        add(run_one("fixed M=100", x0, SearchStrategy::fixed(std::min<std::size_t>(100, universe)), options,
                    options.p));
        break;
    case Suite::MSweep:
        for (std::size_t m : options.m_grid) {
            if (m < 1 || m > universe)
                throw InvalidArgument("search size " + std::to_string(m) + " outside [1, n*T]");
            add(run_one("fixed M=" + std::to_string(m), x0, SearchStrategy::fixed(m), options, options.p));
        }
        break;
    case Suite::PSweep:
        for (double p : options.p_values) {
            char label[32];
            std::snprintf(label, sizeof label, "p=%g", p);
            add(run_one(label, x0, options.sweep_strategy, options, p));
        }
        break;
    }
    return result;
}

std::vector<double> correlation_quartiles(const CorrelationSet& u) {
    std::vector<double> values;
    values.reserve(index_set_size(u.codes(), u.length()));
    const double inv = 1.0 / static_cast<double>(u.length());
    for (std::size_t i = 0; i < u.codes(); ++i)
        for (std::size_t j = i; j < u.codes(); ++j) {
            const auto slab = u.slab(i, j);
            for (std::size_t t = (i == j ? 1 : 0); t < u.length(); ++t) values.push_back(slab[t] * inv);
        }
    std::sort(values.begin(), values.end());
    auto at = [&](double q) {
        const double pos = q * static_cast<double>(values.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, values.size() - 1);
        return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
    };
    return {values.front(), at(0.25), at(0.5), at(0.75), values.back()};
}

nlohmann::json suite_json(const SuiteResult& result) {
    const auto& o = result.options;
    nlohmann::json j;
    j["suite"] = suite_name(result.suite);
    j["codes"] = o.codes;
    j["length"] = o.length;
    j["seed"] = o.seed;
    j["rng"] = rng_json(o.seed, 1);
    j["budget_s"] = o.budget_s ? nlohmann::json(*o.budget_s) : nlohmann::json(nullptr);
    j["max_iters"] = o.max_iterations ? nlohmann::json(*o.max_iterations) : nlohmann::json(nullptr);

    auto rows = nlohmann::json::array();
    for (const auto& run : result.runs) {
        const auto& s = run.result.trace.summary;
        nlohmann::json row = {{"label", run.label},
                              {"strategy", run.strategy.name()},
                              {"p", run.p},
                              {"initial_objective", s.initial_objective},
                              {"final_objective", s.final_objective},
                              {"percent_improvement", s.percent_improvement},
                              {"iterations", s.iterations},
                              {"flips_accepted", s.flips_accepted},
                              {"termination", to_string(s.termination)},
                              {"wall_s", s.wall_s}};
        if (run.strategy.kind == SearchStrategy::Kind::Fixed) row["M"] = run.strategy.search_size;
        switch (result.suite) {
        case Suite::StrategyComparison:
            row["series"] = objective_series(run.result.trace);
            break;
        case Suite::MSweep:
            break;
        case Suite::PSweep: {
            const auto stats = correlation_stats(run.result.correlations);
            row["stats"] = stats_json(stats, true);
            row["quartiles"] = correlation_quartiles(run.result.correlations);
            break;
        }
        }
        rows.push_back(std::move(row));
    }
    j["runs"] = std::move(rows);
    return j;
}

void print_suite_table(std::ostream& out, const SuiteResult& result) {
    char line[160];
    const bool sweep = result.suite == Suite::PSweep;
    std::snprintf(line, sizeof line, "%-14s %16s %16s %9s %12s %10s%s\n", "run", "initial", "final", "impr %",
                  "iterations", "wall s", sweep ? "    max|S|" : "");
    out << line;
    for (const auto& run : result.runs) {
        const auto& s = run.result.trace.summary;
        std::snprintf(line, sizeof line, "%-14s %16.9g %16.9g %9.3f %12llu %10.2f", run.label.c_str(),
                      s.initial_objective, s.final_objective, s.percent_improvement,
                      static_cast<unsigned long long>(s.iterations), s.wall_s);
        out << line;
        if (sweep) {
            std::snprintf(line, sizeof line, " %10.6f", correlation_stats(run.result.correlations).max_abs);
            out << line;
        }
        out << '\n';
    }
}

} // namespace dcor::cli
