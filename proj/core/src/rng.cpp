#include "dcor/rng.hpp"

#include "dcor/error.hpp"

#include <algorithm>
#include <unordered_map>
#include <utility>

namespace dcor {
namespace {
__extension__ using u128 = unsigned __int128;
} // namespace

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
    if (index == 0) return master;
    return splitmix64(master + index * 0x9E3779B97F4A7C15ULL);
}

Rng::Rng(std::uint64_t seed, Stream stream)
    : engine_(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(stream)))) {}

std::uint64_t Rng::below(std::uint64_t bound) {
    if (bound == 0) throw InvalidArgument("Rng::below: bound must be positive");
    // Lemire, "Fast random integer generation in an interval" (2019).
    u128 m = static_cast<u128>(engine_()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            m = static_cast<u128>(engine_()) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

bool Rng::coin() {
    if (bits_left_ == 0) {
        bits_ = engine_();
        bits_left_ = 64;
    }
    const bool bit = bits_ & 1U;
    bits_ >>= 1;
    --bits_left_;
    return bit;
}

void sample_distinct(Rng& rng, std::uint64_t count, std::uint64_t universe,
                     std::vector<std::uint64_t>& out) {
    if (count > universe) throw InvalidArgument("sample_distinct: count exceeds universe");
    out.resize(count);
    if (count == 0) return;

    // Small draws: a flat list of displaced slots beats hashing.
    if (count <= 32) {
        std::pair<std::uint64_t, std::uint64_t> moved[64];
        std::size_t moved_size = 0;
        auto slot = [&](std::uint64_t k) {
            for (std::size_t m = 0; m < moved_size; ++m)
                if (moved[m].first == k) return moved[m].second;
            return k;
        };
        auto assign = [&](std::uint64_t k, std::uint64_t v) {
            for (std::size_t m = 0; m < moved_size; ++m)
                if (moved[m].first == k) {
                    moved[m].second = v;
                    return;
                }
            moved[moved_size++] = {k, v};
        };
        for (std::uint64_t i = 0; i < count; ++i) {
            const std::uint64_t j = i + rng.below(universe - i);
            const std::uint64_t vi = slot(i);
            const std::uint64_t vj = slot(j);
            assign(j, vi);
            out[i] = vj;
        }
        return;
    }

    std::unordered_map<std::uint64_t, std::uint64_t> moved;
    moved.reserve(2 * count);
    auto slot = [&](std::uint64_t k) {
        auto it = moved.find(k);
        return it == moved.end() ? k : it->second;
    };
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::uint64_t j = i + rng.below(universe - i);
        const std::uint64_t vi = slot(i);
        const std::uint64_t vj = slot(j);
        moved[j] = vi;
        out[i] = vj;
    }
}

std::vector<std::uint64_t> sample_distinct(Rng& rng, std::uint64_t count, std::uint64_t universe) {
    std::vector<std::uint64_t> out;
    sample_distinct(rng, count, universe, out);
    return out;
}

} // namespace dcor
