#pragma once

#include "dcor/code_matrix.hpp"
#include "dcor/correlation.hpp"
#include "dcor/optimizer.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>

namespace dcor::cli {

using nlohmann::json;

json stats_json(const CorrelationStats& stats, bool with_histogram);
json histogram_json(const Histogram& h);
json constraint_json(const ConstraintReport& report, const ConstraintSpec& spec);
json summary_json(const RunSummary& s);

/// One trace line. `restart` is included for multi-start runs.
json record_json(const TraceRecord& r, std::optional<std::size_t> restart);

/// Seed bookkeeping written into trace headers and summaries.
json rng_json(std::uint64_t seed, std::size_t restarts);

/// Objective, statistics and constraint audit of a code family.
json evaluate_json(const CodeMatrix& x, const ObjectiveSpec& spec);

} // namespace dcor::cli
