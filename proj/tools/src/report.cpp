#include "report.hpp"

#include "dcor/objective.hpp"
#include "dcor/rng.hpp"

namespace dcor::cli {

json histogram_json(const Histogram& h) {
    return {{"lo", h.lo}, {"hi", h.hi}, {"bins", h.counts.size()}, {"counts", h.counts}};
}

json stats_json(const CorrelationStats& stats, bool with_histogram) {
    json j = {{"max_abs", stats.max_abs}, {"mean", stats.mean}, {"std", stats.std}, {"count", stats.count}};
    if (with_histogram) j["histogram"] = histogram_json(stats.histogram);
    return j;
}

json constraint_json(const ConstraintReport& report, const ConstraintSpec& spec) {
    json codes = json::array();
    std::size_t balanced = 0;
    std::size_t acz = 0;
    for (const auto& c : report.codes) {
        codes.push_back({{"row_sum", c.row_sum},
                         {"shift1", c.shift1},
                         {"balanced", c.balanced_ok},
                         {"acz", c.acz_ok}});
        balanced += c.balanced_ok;
        acz += c.acz_ok;
    }
    return {{"checked", {{"balanced", spec.balanced}, {"acz", spec.acz}}},
            {"balanced_codes", balanced},
            {"acz_codes", acz},
            {"all_ok", report.all_ok()},
            {"codes", std::move(codes)}};
}

json summary_json(const RunSummary& s) {
    return {{"initial_objective", s.initial_objective},
            {"final_objective", s.final_objective},
            {"percent_improvement", s.percent_improvement},
            {"iterations", s.iterations},
            {"flips_accepted", s.flips_accepted},
            {"termination", to_string(s.termination)},
            {"wall_s", s.wall_s}};
}

json record_json(const TraceRecord& r, std::optional<std::size_t> restart) {
    json j = {{"k", r.iteration},
              {"t_wall_s", r.wall_s},
              {"M", r.search_size},
              {"a", r.index.code},
              {"b", r.index.chip}};
    if (r.partner_chip) j["b2"] = *r.partner_chip;
    j["delta"] = r.delta;
    j["accepted"] = r.accepted;
    j["objective"] = r.objective;
    if (restart) j["restart"] = *restart;
    return j;
}

json rng_json(std::uint64_t seed, std::size_t restarts) {
    json seeds = json::array();
    for (std::size_t r = 0; r < restarts; ++r) seeds.push_back(derive_seed(seed, r));
    return {{"algorithm", Rng::kAlgorithm},
            {"seed", seed},
            {"restart_seed_rule", "seed_r = seed if r == 0 else splitmix64(seed + r * 0x9E3779B97F4A7C15)"},
            {"restart_seeds", std::move(seeds)}};
}

json evaluate_json(const CodeMatrix& x, const ObjectiveSpec& spec) {
    const auto u = correlate_fft(x);
    const auto stats = correlation_stats(u);
    return {{"codes", x.codes()},
            {"length", x.length()},
            {"p", spec.p},
            {"objective", objective(u, spec)},
            {"stats", stats_json(stats, true)},
            {"constraints", constraint_json(check_constraints(x, {true, true}), {true, true})}};
}

} // namespace dcor::cli
