#include "dcor/error.hpp"
#include "dcor/optimizer.hpp"
#include "run_recorder.hpp"
#include "shift_loops.hpp"

#include <tbb/parallel_for.h>

#include <limits>
#include <string>
#include <tuple>

namespace dcor {
namespace {

using detail::wrap_add;
using detail::wrap_sub;

struct PairMove {
    std::size_t code = 0;
    std::size_t plus_slot = 0;  // position in the code's list of +1 chips
    std::size_t minus_slot = 0; // position in the code's list of -1 chips
    std::size_t plus_chip = 0;
    std::size_t minus_chip = 0;

    auto key() const {
        return std::tuple{code, std::min(plus_chip, minus_chip), std::max(plus_chip, minus_chip)};
    }
};

class PairDescent {
public:
    PairDescent(CodeMatrix x0, const SearchStrategy& strategy, const RunConfig& config, const RunHooks& hooks)
        : recorder_(config, hooks),
          x_(std::move(x0)),
          u_(correlate_fft(x_)),
          table_(config.objective, x_.length()),
          strategy_(strategy),
          config_(config),
          rng_(config.seed, Rng::Stream::Search),
          half_(x_.length() / 2),
          universe_(x_.codes() * half_ * half_) {
        plus_.resize(x_.codes());
        minus_.resize(x_.codes());
        for (std::size_t a = 0; a < x_.codes(); ++a)
            for (std::size_t t = 0; t < x_.length(); ++t) (x_(a, t) > 0 ? plus_[a] : minus_[a]).push_back(t);
        initial_ = objective(u_, table_);
        current_ = initial_;
        if (strategy.kind == SearchStrategy::Kind::Fixed && !config.stall_limit)
            stall_limit_ = 5 * static_cast<std::uint64_t>(x_.codes() * x_.length());
        else
            stall_limit_ = config.stall_limit;
    }

    std::size_t universe() const noexcept { return universe_; }

    RunResult run() {
        const Termination reason = loop();
        const double final_objective = objective(u_, table_);
        auto trace = recorder_.finish(reason, initial_, final_objective);
        return RunResult{std::move(x_), std::move(u_), std::move(trace)};
    }

private:
    Termination loop() {
        std::optional<AdaptiveSchedule> schedule;
        if (strategy_.kind == SearchStrategy::Kind::Adaptive) schedule.emplace(universe_, x_.length());
        std::uint64_t failures = 0;
        while (true) {
            if (auto reason = recorder_.exhausted()) return *reason;
            std::size_t m = universe_;
            if (strategy_.kind == SearchStrategy::Kind::Fixed) m = strategy_.search_size;
            if (schedule) m = schedule->search_size();

            const bool improved = iteration(m);
            if (schedule) schedule->record(improved);
            failures = improved ? 0 : failures + 1;
            if (stop_) return Termination::Stopped;
            if (!improved && m == universe_) return Termination::LocalOptimum;
            if (stall_limit_ && failures >= *stall_limit_ && m != universe_) return Termination::StallLimit;
        }
    }

    PairMove decode(std::uint64_t r) const {
        PairMove mv;
        const std::size_t per_code = half_ * half_;
        mv.code = r / per_code;
        const std::size_t rest = r % per_code;
        mv.plus_slot = rest / half_;
        mv.minus_slot = rest % half_;
        mv.plus_chip = plus_[mv.code][mv.plus_slot];
        mv.minus_chip = minus_[mv.code][mv.minus_slot];
        return mv;
    }

    bool keeps_acz(const PairMove& mv) const {
        if (!config_.constraints.acz) return true;
        const std::size_t len = x_.length();
        const auto code = x_.row(mv.code);
        auto after_first = [&](std::size_t k) -> long { return k == mv.plus_chip ? -code[k] : code[k]; };
        const long d1 = -2L * code[mv.plus_chip] *
                        (code[wrap_add(mv.plus_chip, 1, len)] + code[wrap_sub(mv.plus_chip, 1, len)]);
        const long d2 = -2L * code[mv.minus_chip] *
                        (after_first(wrap_add(mv.minus_chip, 1, len)) + after_first(wrap_sub(mv.minus_chip, 1, len)));
        return acz_satisfied(u_.value(mv.code, mv.code, 1) + d1 + d2, len);
    }

    bool iteration(std::size_t m) {
        moves_.resize(m);
        if (m == universe_) {
            for (std::size_t r = 0; r < m; ++r) moves_[r] = decode(r);
        } else {
            sample_distinct(rng_, m, universe_, draws_);
            for (std::size_t c = 0; c < m; ++c) moves_[c] = decode(draws_[c]);
        }
        deltas_.resize(m);
        auto evaluate = [&](std::size_t c) {
            const auto& mv = moves_[c];
            if (!keeps_acz(mv))
                deltas_[c] = {std::numeric_limits<double>::infinity(), 0.0};
            else
                deltas_[c] = pair_delta(x_, u_, mv.code, mv.plus_chip, mv.minus_chip, table_);
        };
        if (m >= 4)
            tbb::parallel_for(std::size_t{0}, m, evaluate);
        else
            for (std::size_t c = 0; c < m; ++c) evaluate(c);

        std::size_t best = 0;
        for (std::size_t c = 1; c < m; ++c)
            if (deltas_[c].value < deltas_[best].value ||
                (deltas_[c].value == deltas_[best].value && moves_[c].key() < moves_[best].key()))
                best = c;

        const PairMove mv = moves_[best];
        const DeltaEstimate d = deltas_[best];
        const bool improved = d.improves();
        if (improved) {
            const BitIndex first{mv.code, mv.plus_chip};
            const BitIndex second{mv.code, mv.minus_chip};
            apply_flip(u_, x_, first);
            x_.flip_unchecked(first);
            apply_flip(u_, x_, second);
            x_.flip_unchecked(second);
            plus_[mv.code][mv.plus_slot] = mv.minus_chip;
            minus_[mv.code][mv.minus_slot] = mv.plus_chip;
            current_ += d.value;
        }
        stop_ = !recorder_.log(m, {mv.code, mv.plus_chip}, mv.minus_chip, d.value, improved, current_, x_, u_);
        return improved;
    }

    detail::RunRecorder recorder_;
    CodeMatrix x_;
    CorrelationSet u_;
    PowerTable table_;
    const SearchStrategy& strategy_;
    const RunConfig& config_;
    Rng rng_;
    std::size_t half_;
    std::size_t universe_;
    std::vector<std::vector<std::size_t>> plus_;
    std::vector<std::vector<std::size_t>> minus_;
    std::optional<std::uint64_t> stall_limit_;
    double initial_ = 0.0;
    double current_ = 0.0;
    bool stop_ = false;
    std::vector<std::uint64_t> draws_;
    std::vector<PairMove> moves_;
    std::vector<DeltaEstimate> deltas_;
};

} // namespace

RunResult pair_flip_descend(CodeMatrix x0, const SearchStrategy& strategy, const RunConfig& config,
                            const RunHooks& hooks) {
    RunConfig cfg = config;
    cfg.constraints.balanced = true;
    detail::validate_run(x0, strategy, cfg);
    const std::size_t half = x0.length() / 2;
    const std::size_t universe = x0.codes() * half * half;
    if (strategy.kind == SearchStrategy::Kind::Fixed && strategy.search_size > universe)
        throw InvalidArgument("fixed search size must be at most the pair count " + std::to_string(universe));
    return PairDescent(std::move(x0), strategy, cfg, hooks).run();
}

} // namespace dcor
