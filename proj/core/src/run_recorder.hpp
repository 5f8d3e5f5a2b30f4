#pragma once

#include "dcor/optimizer.hpp"

#include <chrono>
#include <optional>

namespace dcor::detail {

// Budget checks, trace retention and hook dispatch shared by the descent
// loops.
class RunRecorder {
public:
    RunRecorder(const RunConfig& config, const RunHooks& hooks)
        : config_(config), hooks_(hooks), start_(std::chrono::steady_clock::now()) {}

    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

    std::uint64_t iterations() const noexcept { return iterations_; }
    std::uint64_t accepted() const noexcept { return accepted_; }

    /// Reason to stop before starting another iteration, if any.
    std::optional<Termination> exhausted() const {
        if (config_.max_iterations && iterations_ >= *config_.max_iterations) return Termination::MaxIterations;
        if (config_.time_limit_s && elapsed() >= *config_.time_limit_s) return Termination::TimeLimit;
        return std::nullopt;
    }

    /// Logs one finished iteration. Returns false when a hook asked to stop.
    bool log(std::size_t search_size, BitIndex index, std::optional<std::size_t> partner, double delta,
             bool accepted, double objective, const CodeMatrix& x, const CorrelationSet& u) {
        ++iterations_;
        if (accepted) ++accepted_;
        TraceRecord rec;
        rec.iteration = iterations_;
        rec.wall_s = elapsed();
        rec.search_size = search_size;
        rec.index = index;
        rec.partner_chip = partner;
        rec.delta = delta;
        rec.accepted = accepted;
        rec.objective = objective;
        if (accepted || (config_.record_interval && iterations_ % config_.record_interval == 0)) {
            if (hooks_.on_record) hooks_.on_record(rec);
            trace_.records.push_back(rec);
        }
        if (hooks_.on_iteration) return hooks_.on_iteration(IterationState{rec, x, u});
        return true;
    }

    RunTrace finish(Termination reason, double initial_objective, double final_objective) {
        auto& s = trace_.summary;
        s.initial_objective = initial_objective;
        s.final_objective = final_objective;
        s.percent_improvement =
            initial_objective > 0.0 ? 100.0 * (initial_objective - final_objective) / initial_objective : 0.0;
        s.iterations = iterations_;
        s.flips_accepted = accepted_;
        s.termination = reason;
        s.wall_s = elapsed();
        return std::move(trace_);
    }

private:
    const RunConfig& config_;
    const RunHooks& hooks_;
    std::chrono::steady_clock::time_point start_;
    std::uint64_t iterations_ = 0;
    std::uint64_t accepted_ = 0;
    RunTrace trace_;
};

// Shared argument checks; returns n * T.
std::size_t validate_run(const CodeMatrix& x0, const SearchStrategy& strategy, const RunConfig& config);

} // namespace dcor::detail
