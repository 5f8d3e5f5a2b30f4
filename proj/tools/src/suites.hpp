#pragma once

#include "dcor/optimizer.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dcor::cli {

enum class Suite { StrategyComparison, MSweep, PSweep };

std::optional<Suite> parse_suite(std::string_view name);
std::string_view suite_name(Suite suite);

struct SuiteOptions {
    std::size_t codes = 10;
    std::size_t length = 127;
    std::uint64_t seed = 1;
    std::optional<double> budget_s;
    std::optional<std::uint64_t> max_iterations;
    double p = 6.0;
    std::vector<std::size_t> m_grid{1, 10, 100, 1000};
    std::vector<double> p_values{2.0, 4.0, 6.0};
    /// Strategy of the p-sweep runs.
    SearchStrategy sweep_strategy = SearchStrategy::adaptive();
};

struct SuiteRun {
    std::string label;
    SearchStrategy strategy;
    double p = 6.0;
    RunResult result;
};

struct SuiteResult {
    Suite suite = Suite::StrategyComparison;
    SuiteOptions options;
    std::vector<SuiteRun> runs;
};

/// A run finished without completing a single iteration.
class BudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Runs one suite. Every run starts from random_code_matrix(codes, length,
/// seed) and searches with the same seed. `on_run` is told about each run as
/// it finishes.
SuiteResult run_suite(Suite suite, const SuiteOptions& options,
                      const std::function<void(const SuiteRun&)>& on_run = {});

/// Table rows plus plot series.
nlohmann::json suite_json(const SuiteResult& result);

/// Human-readable table.
void print_suite_table(std::ostream& out, const SuiteResult& result);

/// Five-number summary of the normalized correlations over the objective
/// index set: min, lower quartile, median, upper quartile, max.
std::vector<double> correlation_quartiles(const CorrelationSet& u);

} // namespace dcor::cli
