#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace dcor {

/// SplitMix64 finalizer. Used to decorrelate seeds and derive streams.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of restart `index` in a multi-start run.
///
/// `derive_seed(master, 0) == master`, so a single restart reproduces a plain
/// run. For index r > 0 the seed is `splitmix64(master + r * 0x9E3779B97F4A7C15)`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

/// Deterministic random source used everywhere in the library.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Bounded integers use Lemire's multiply-shift rejection method
/// instead of std::uniform_int_distribution (whose output is
/// implementation-defined), so sequences are identical across toolchains.
/// One seed feeds independent streams; the engine for stream s is seeded with
/// `splitmix64(seed ^ splitmix64(s))`.
class Rng {
public:
    static constexpr std::string_view kAlgorithm = "mt19937_64+splitmix64-streams+lemire-bounded";

    enum class Stream : std::uint64_t {
        Init = 1,   // random code matrices
        Search = 2, // candidate sampling
        Repair = 3, // feasible initialization
    };

    Rng(std::uint64_t seed, Stream stream);

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, bound). bound must be nonzero.
    std::uint64_t below(std::uint64_t bound);

    /// Fair coin, one engine bit per call.
    bool coin();

private:
    std::mt19937_64 engine_;
    std::uint64_t bits_ = 0;
    int bits_left_ = 0;
};

/// `count` distinct values drawn uniformly from [0, universe), in draw order.
///
/// Partial Fisher-Yates over the virtual array 0..universe-1: step i swaps
/// slot i with slot i + below(universe - i) and emits slot i. Displaced slots
/// live in a sparse map, so memory is O(count) regardless of universe.
std::vector<std::uint64_t> sample_distinct(Rng& rng, std::uint64_t count, std::uint64_t universe);

/// As above, writing into `out` (resized to count) to avoid reallocating.
void sample_distinct(Rng& rng, std::uint64_t count, std::uint64_t universe,
                     std::vector<std::uint64_t>& out);

} // namespace dcor
