#pragma once

#include "dcor/code_matrix.hpp"
#include "dcor/correlation.hpp"
#include "dcor/objective.hpp"
#include "dcor/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dcor {

/// How many candidate flips each iteration examines.
struct SearchStrategy {
    enum class Kind { Greedy, Fixed, Adaptive };

    Kind kind = Kind::Adaptive;
    std::size_t search_size = 100; // Fixed only

    static SearchStrategy greedy() { return {Kind::Greedy, 0}; }
    static SearchStrategy fixed(std::size_t m) { return {Kind::Fixed, m}; }
    static SearchStrategy adaptive() { return {Kind::Adaptive, 0}; }

    std::string name() const;
};

/// Search-size schedule of the adaptive strategy.
///
/// Starts at one candidate. Two consecutive non-improving iterations grow the
/// search size by one; an improving iteration or a growth step resets the
/// failure count. Once the size reaches min(10 * length, universe) the
/// schedule switches to greedy for good.
class AdaptiveSchedule {
public:
    static constexpr std::size_t kFailuresPerIncrement = 2;
    static constexpr std::size_t kGreedyFactor = 10;

    AdaptiveSchedule(std::size_t universe, std::size_t length);

    std::size_t search_size() const noexcept { return greedy_ ? universe_ : size_; }
    bool greedy() const noexcept { return greedy_; }
    std::size_t switch_threshold() const noexcept { return threshold_; }

    /// Feeds the outcome of one iteration.
    void record(bool improved) noexcept;

private:
    std::size_t universe_;
    std::size_t threshold_;
    std::size_t size_ = 1;
    std::size_t failures_ = 0;
    bool greedy_ = false;
};

struct RunConfig {
    std::optional<std::uint64_t> max_iterations;
    std::optional<double> time_limit_s;
    /// Consecutive non-improving iterations before a sampled search stops.
    /// Unset means 5 * n * T for the fixed strategy and no limit otherwise.
    std::optional<std::uint64_t> stall_limit;
    std::uint64_t seed = 0;
    ConstraintSpec constraints;
    ObjectiveSpec objective;
    /// Non-improving iterations are retained in the trace every this many.
    std::uint64_t record_interval = 1000;
};

enum class Termination { LocalOptimum, MaxIterations, TimeLimit, StallLimit, Stopped };

std::string_view to_string(Termination reason);

/// One iteration of a run. `partner_chip` is set for balanced pair moves.
struct TraceRecord {
    std::uint64_t iteration = 0;
    double wall_s = 0.0;
    std::size_t search_size = 0;
    BitIndex index;
    std::optional<std::size_t> partner_chip;
    double delta = 0.0;
    bool accepted = false;
    double objective = 0.0;
};

struct RunSummary {
    double initial_objective = 0.0;
    double final_objective = 0.0;
    double percent_improvement = 0.0;
    std::uint64_t iterations = 0;
    std::uint64_t flips_accepted = 0;
    Termination termination = Termination::LocalOptimum;
    double wall_s = 0.0;
};

/// Retained iteration records (accepted flips plus periodic checkpoints) and
/// the terminal summary. The summary's final objective is re-evaluated from
/// the final correlation set, not accumulated from deltas.
struct RunTrace {
    std::vector<TraceRecord> records;
    RunSummary summary;
};

struct IterationState {
    const TraceRecord& record;
    const CodeMatrix& codes;
    const CorrelationSet& correlations;
};

struct RunHooks {
    /// Called for every retained record, in order, as soon as it exists.
    std::function<void(const TraceRecord&)> on_record;
    /// Called after every iteration; returning false ends the run with
    /// Termination::Stopped.
    std::function<bool(const IterationState&)> on_iteration;
};

struct RunResult {
    CodeMatrix codes;
    CorrelationSet correlations;
    RunTrace trace;
};

/// `count` distinct flip positions, uniform without replacement, in draw
/// order. Position r maps to BitIndex{r / length, r % length}.
std::vector<BitIndex> sample_candidates(Rng& rng, std::size_t count, std::size_t codes, std::size_t length);

struct Selection {
    BitIndex index;
    DeltaEstimate delta;
};

/// Candidate with the smallest delta; ties go to the lexicographically
/// smallest index. Throws InvalidArgument on empty or mismatched input.
Selection select_best(std::span<const BitIndex> candidates, std::span<const DeltaEstimate> deltas);

/// Whether flipping idx keeps `constraints` satisfied. Any single flip breaks
/// exact balance; for the sidelobe-zero constraint only the shift-1
/// autocorrelation of the flipped code is checked, in O(1).
bool flip_keeps_constraints(const CodeMatrix& x, const CorrelationSet& u, BitIndex idx,
                            const ConstraintSpec& constraints);

/// delta(x, u, idx), or +infinity when the flip would violate `constraints`.
double constrained_delta(const CodeMatrix& x, const CorrelationSet& u, BitIndex idx,
                         const PowerTable& table, const ConstraintSpec& constraints);

/// Bit-flip descent from x0.
///
/// Sampled strategies evaluate each candidate's delta on demand. Greedy (and
/// adaptive after its switch) keeps the full delta matrix and updates it
/// after every committed flip; it stops at a single-flip local optimum. A
/// flip is committed only when its delta is strictly negative and the
/// constraints still hold. With the balanced constraint the run is delegated
/// to pair_flip_descend. Throws InfeasibleError if x0 violates the
/// constraints.
RunResult descend(CodeMatrix x0, const SearchStrategy& strategy, const RunConfig& config,
                  const RunHooks& hooks = {});

/// Descent over balance-preserving moves: each candidate flips one +1 chip
/// and one -1 chip of the same code. The strategy is applied to the pool of
/// n * (T/2)^2 such pairs; greedy evaluates the whole pool every iteration.
RunResult pair_flip_descend(CodeMatrix x0, const SearchStrategy& strategy, const RunConfig& config,
                            const RunHooks& hooks = {});

/// Random family repaired until it satisfies `constraints`.
///
/// Each code descends on the penalty sum^2 (balanced) plus (v - target)^2
/// (sidelobe zero, v the unnormalized shift-1 autocorrelation, target 0 or the
/// nearer of +-1), taking sideways or random moves when stuck. Throws
/// InfeasibleError if some code is still penalized after `max_flips_per_code`.
CodeMatrix feasible_init(std::size_t codes, std::size_t length, const ConstraintSpec& constraints,
                         std::uint64_t seed, std::size_t max_flips_per_code = 0);

struct MultiStartResult {
    RunResult best;
    std::size_t best_restart = 0;
    std::vector<RunSummary> restarts;
    double min_final = 0.0;
    double max_final = 0.0;
};

/// Independent runs from `restarts` random starts. Restart r uses seed
/// derive_seed(config.seed, r) for both its starting family and its search,
/// so restarts == 1 reproduces descend(random_code_matrix(n, T, seed), ...).
/// The best run is the one with the smallest final objective (earliest on
/// ties).
MultiStartResult multi_start(std::size_t codes, std::size_t length, const SearchStrategy& strategy,
                             const RunConfig& config, std::size_t restarts,
                             const std::function<RunHooks(std::size_t)>& hooks_for = {});

/// Starting family used by multi_start for a given seed: random, repaired by
/// feasible_init when constraints are active.
CodeMatrix initial_family(std::size_t codes, std::size_t length, const ConstraintSpec& constraints,
                          std::uint64_t seed);

} // namespace dcor
