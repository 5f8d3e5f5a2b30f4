#include "dcor/optimizer.hpp"

#include "dcor/error.hpp"
#include "run_recorder.hpp"
#include "shift_loops.hpp"

#include <tbb/parallel_for.h>

#include <algorithm>
#include <limits>
#include <string>

namespace dcor {
namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Candidate batches below this size are evaluated on the calling thread.
constexpr std::size_t kParallelCandidates = 4;

struct GreedyPick {
    bool found = false;
    BitIndex index;
    double value = kInfinity;
};

// Row-major scan, so the first minimum is the lexicographically smallest.
GreedyPick greedy_argmin(const DeltaMatrix& deltas, const CodeMatrix& x, const CorrelationSet& u,
                         const ConstraintSpec& constraints) {
    GreedyPick pick;
    for (std::size_t a = 0; a < deltas.codes(); ++a) {
        const auto row = deltas.row(a);
        for (std::size_t b = 0; b < row.size(); ++b) {
            if (row[b] < pick.value && (!constraints.acz || flip_keeps_constraints(x, u, {a, b}, constraints))) {
                pick.found = true;
                pick.index = {a, b};
                pick.value = row[b];
            }
        }
    }
    return pick;
}

class Descent {
public:
    Descent(CodeMatrix x0, const SearchStrategy& strategy, const RunConfig& config, const RunHooks& hooks)
        : recorder_(config, hooks),
          x_(std::move(x0)),
          u_(correlate_fft(x_)),
          table_(config.objective, x_.length()),
          strategy_(strategy),
          config_(config),
          rng_(config.seed, Rng::Stream::Search),
          universe_(x_.codes() * x_.length()) {
        initial_ = objective(u_, table_);
        current_ = initial_;
        if (strategy.kind == SearchStrategy::Kind::Fixed && !config.stall_limit)
            stall_limit_ = 5 * static_cast<std::uint64_t>(universe_);
        else
            stall_limit_ = config.stall_limit;
    }

    RunResult run() {
        const Termination reason = [&] {
            switch (strategy_.kind) {
            case SearchStrategy::Kind::Greedy:
                return run_greedy();
            case SearchStrategy::Kind::Fixed:
                return run_fixed();
            case SearchStrategy::Kind::Adaptive:
                return run_adaptive();
            }
            return Termination::Stopped;
        }();
        const double final_objective = objective(u_, table_);
        auto trace = recorder_.finish(reason, initial_, final_objective);
        return RunResult{std::move(x_), std::move(u_), std::move(trace)};
    }

private:
    struct Outcome {
        bool improved = false;
        bool local_optimum = false;
        bool stop = false;
    };

    Outcome sampled_iteration(std::size_t m) {
        sample_candidates_into(m);
        deltas_.resize(m);
        auto evaluate = [&](std::size_t c) {
            const BitIndex idx = candidates_[c];
            if (config_.constraints.acz && !flip_keeps_constraints(x_, u_, idx, config_.constraints))
                deltas_[c] = {kInfinity, 0.0};
            else
                deltas_[c] = delta_estimate(x_, u_, idx, table_);
        };
        if (m >= kParallelCandidates)
            tbb::parallel_for(std::size_t{0}, m, evaluate);
        else
            for (std::size_t c = 0; c < m; ++c) evaluate(c);

        const Selection best = select_best(candidates_, deltas_);
        Outcome out;
        out.improved = best.delta.improves();
        if (out.improved) {
            apply_flip(u_, x_, best.index);
            x_.flip_unchecked(best.index);
            current_ += best.delta.value;
        } else if (m == universe_) {
            out.local_optimum = true;
        }
        out.stop = !recorder_.log(m, best.index, std::nullopt, best.delta.value, out.improved, current_, x_, u_);
        return out;
    }

    void sample_candidates_into(std::size_t m) {
        sample_distinct(rng_, m, universe_, draws_);
        candidates_.resize(m);
        const std::size_t len = x_.length();
        for (std::size_t c = 0; c < m; ++c) candidates_[c] = {draws_[c] / len, draws_[c] % len};
    }

    bool stalled(std::uint64_t failures) const { return stall_limit_ && failures >= *stall_limit_; }

    Termination run_fixed() {
        std::uint64_t failures = 0;
        while (true) {
            if (auto reason = recorder_.exhausted()) return *reason;
            const Outcome out = sampled_iteration(strategy_.search_size);
            failures = out.improved ? 0 : failures + 1;
            if (out.stop) return Termination::Stopped;
            if (out.local_optimum) return Termination::LocalOptimum;
            if (stalled(failures)) return Termination::StallLimit;
        }
    }

    Termination run_adaptive() {
        AdaptiveSchedule schedule(universe_, x_.length());
        std::uint64_t failures = 0;
        while (!schedule.greedy()) {
            if (auto reason = recorder_.exhausted()) return *reason;
            const Outcome out = sampled_iteration(schedule.search_size());
            schedule.record(out.improved);
            failures = out.improved ? 0 : failures + 1;
            if (out.stop) return Termination::Stopped;
            if (out.local_optimum) return Termination::LocalOptimum;
            if (stalled(failures)) return Termination::StallLimit;
        }
        return run_greedy();
    }

    Termination run_greedy() {
        if (auto reason = recorder_.exhausted()) return *reason;
        DeltaMatrix deltas = delta_matrix_full(x_, u_, table_);
        bool fresh = true;
        while (true) {
            if (auto reason = recorder_.exhausted()) return *reason;
            const GreedyPick pick = greedy_argmin(deltas, x_, u_, config_.constraints);
            DeltaEstimate check;
            if (pick.found && pick.value < 0.0) check = delta_estimate(x_, u_, pick.index, table_);
            if (!pick.found || pick.value >= 0.0 || !check.improves()) {
                // Incremental updates drift; confirm on a rebuilt matrix
                // before declaring a local optimum.
                if (fresh) return Termination::LocalOptimum;
                deltas = delta_matrix_full(x_, u_, table_);
                fresh = true;
                continue;
            }
            update_delta_matrix(deltas, x_, u_, pick.index, table_);
            fresh = false;
            current_ += check.value;
            if (!recorder_.log(universe_, pick.index, std::nullopt, check.value, true, current_, x_, u_))
                return Termination::Stopped;
        }
    }

    detail::RunRecorder recorder_;
    CodeMatrix x_;
    CorrelationSet u_;
    PowerTable table_;
    const SearchStrategy& strategy_;
    const RunConfig& config_;
    Rng rng_;
    std::size_t universe_;
    std::optional<std::uint64_t> stall_limit_;
    double initial_ = 0.0;
    double current_ = 0.0;
    std::vector<std::uint64_t> draws_;
    std::vector<BitIndex> candidates_;
    std::vector<DeltaEstimate> deltas_;
};

} // namespace

std::string SearchStrategy::name() const {
    switch (kind) {
    case Kind::Greedy:
        return "greedy";
    case Kind::Fixed:
        return "fixed(M=" + std::to_string(search_size) + ")";
    case Kind::Adaptive:
        return "adaptive";
    }
    return "unknown";
}

AdaptiveSchedule::AdaptiveSchedule(std::size_t universe, std::size_t length)
    : universe_(universe), threshold_(std::min(kGreedyFactor * length, universe)) {
    if (universe == 0) throw InvalidArgument("adaptive schedule needs a nonempty move pool");
    greedy_ = size_ >= threshold_;
}

void AdaptiveSchedule::record(bool improved) noexcept {
    if (greedy_) return;
    if (improved) {
        failures_ = 0;
        return;
    }
    if (++failures_ < kFailuresPerIncrement) return;
    failures_ = 0;
    ++size_;
    if (size_ >= threshold_) greedy_ = true;
}

std::string_view to_string(Termination reason) {
    switch (reason) {
    case Termination::LocalOptimum:
        return "local_optimum";
    case Termination::MaxIterations:
        return "max_iterations";
    case Termination::TimeLimit:
        return "time_limit";
    case Termination::StallLimit:
        return "stall_limit";
    case Termination::Stopped:
        return "stopped";
    }
    return "unknown";
}

std::vector<BitIndex> sample_candidates(Rng& rng, std::size_t count, std::size_t codes, std::size_t length) {
    const std::size_t universe = codes * length;
    if (count < 1 || count > universe)
        throw InvalidArgument("search size must be in [1, n*T], got " + std::to_string(count));
    const auto draws = sample_distinct(rng, count, universe);
    std::vector<BitIndex> out;
    out.reserve(count);
    for (auto r : draws) out.push_back({r / length, r % length});
    return out;
}

Selection select_best(std::span<const BitIndex> candidates, std::span<const DeltaEstimate> deltas) {
    if (candidates.empty()) throw InvalidArgument("select_best: no candidates");
    if (candidates.size() != deltas.size()) throw InvalidArgument("select_best: one delta per candidate expected");
    std::size_t best = 0;
    for (std::size_t c = 1; c < candidates.size(); ++c) {
        if (deltas[c].value < deltas[best].value ||
            (deltas[c].value == deltas[best].value && candidates[c] < candidates[best]))
            best = c;
    }
    return {candidates[best], deltas[best]};
}

bool flip_keeps_constraints(const CodeMatrix& x, const CorrelationSet& u, BitIndex idx,
                            const ConstraintSpec& constraints) {
    if (constraints.balanced) return false;
    if (!constraints.acz) return true;
    const std::size_t len = x.length();
    const auto code = x.row(idx.code);
    const long change = -2L * code[idx.chip] *
                        (code[detail::wrap_add(idx.chip, 1, len)] + code[detail::wrap_sub(idx.chip, 1, len)]);
    return acz_satisfied(u.value(idx.code, idx.code, 1) + change, len);
}

double constrained_delta(const CodeMatrix& x, const CorrelationSet& u, BitIndex idx, const PowerTable& table,
                         const ConstraintSpec& constraints) {
    if (!flip_keeps_constraints(x, u, idx, constraints)) return kInfinity;
    return delta(x, u, idx, table);
}

namespace detail {

std::size_t validate_run(const CodeMatrix& x0, const SearchStrategy& strategy, const RunConfig& config) {
    config.objective.validate();
    validate_constraints(config.constraints, x0.length());
    if (config.time_limit_s && !(*config.time_limit_s >= 0.0))
        throw InvalidArgument("time limit must be nonnegative");
    if (strategy.kind == SearchStrategy::Kind::Fixed && strategy.search_size < 1)
        throw InvalidArgument("fixed search size must be at least 1");
    if (!check_constraints(x0, config.constraints).all_ok())
        throw InfeasibleError("initial code family violates the requested constraints");
    return x0.codes() * x0.length();
}

} // namespace detail

RunResult descend(CodeMatrix x0, const SearchStrategy& strategy, const RunConfig& config, const RunHooks& hooks) {
    if (config.constraints.balanced) return pair_flip_descend(std::move(x0), strategy, config, hooks);
    const std::size_t universe = detail::validate_run(x0, strategy, config);
    if (strategy.kind == SearchStrategy::Kind::Fixed && strategy.search_size > universe)
        throw InvalidArgument("fixed search size must be in [1, n*T], got " + std::to_string(strategy.search_size));
    return Descent(std::move(x0), strategy, config, hooks).run();
}

CodeMatrix initial_family(std::size_t codes, std::size_t length, const ConstraintSpec& constraints,
                          std::uint64_t seed) {
    if (constraints.any()) return feasible_init(codes, length, constraints, seed);
    return random_code_matrix(codes, length, seed);
}

MultiStartResult multi_start(std::size_t codes, std::size_t length, const SearchStrategy& strategy,
                             const RunConfig& config, std::size_t restarts,
                             const std::function<RunHooks(std::size_t)>& hooks_for) {
    if (restarts < 1) throw InvalidArgument("multi_start needs at least one restart");
    std::optional<RunResult> best;
    MultiStartResult out{RunResult{CodeMatrix(codes, length), CorrelationSet(codes, length), {}}, 0, {}, 0.0, 0.0};
    for (std::size_t r = 0; r < restarts; ++r) {
        RunConfig cfg = config;
        cfg.seed = derive_seed(config.seed, r);
        const RunHooks hooks = hooks_for ? hooks_for(r) : RunHooks{};
        RunResult result = descend(initial_family(codes, length, config.constraints, cfg.seed), strategy, cfg, hooks);
        out.restarts.push_back(result.trace.summary);
        if (!best || result.trace.summary.final_objective < best->trace.summary.final_objective) {
            best = std::move(result);
            out.best_restart = r;
        }
    }
    out.best = std::move(*best);
    const auto [lo, hi] = std::minmax_element(out.restarts.begin(), out.restarts.end(),
                                              [](const auto& l, const auto& r) { return l.final_objective < r.final_objective; });
    out.min_final = lo->final_objective;
    out.max_final = hi->final_objective;
    return out;
}

} // namespace dcor
