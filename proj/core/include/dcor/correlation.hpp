#pragma once

#include "dcor/code_matrix.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dcor {

/// All periodic shift-correlations of a code family, unnormalized.
///
/// value(i, j, t) = sum_tau x[i][tau] * x[j][(tau - t) mod T], i.e. T times
/// the normalized correlation. Integer storage keeps incremental updates
/// exact. Only pairs with i <= j are stored, each as a contiguous slab of T
/// shifts; value(j, i, t) resolves to value(i, j, (T - t) mod T).
class CorrelationSet {
public:
    CorrelationSet(std::size_t codes, std::size_t length);

    std::size_t codes() const noexcept { return codes_; }
    std::size_t length() const noexcept { return length_; }
    std::size_t pair_count() const noexcept { return codes_ * (codes_ + 1) / 2; }

    /// Slab of the stored pair (i, j); requires i <= j.
    std::span<std::int32_t> slab(std::size_t i, std::size_t j) noexcept {
        return {values_.data() + pair_offset(i, j), length_};
    }
    std::span<const std::int32_t> slab(std::size_t i, std::size_t j) const noexcept {
        return {values_.data() + pair_offset(i, j), length_};
    }

    /// Value for any ordered pair.
    std::int32_t value(std::size_t i, std::size_t j, std::size_t t) const noexcept {
        if (i <= j) return values_[pair_offset(i, j) + t];
        return values_[pair_offset(j, i) + (t == 0 ? 0 : length_ - t)];
    }

    /// Normalized correlation (Sigma_t)_{i,j}.
    double normalized(std::size_t i, std::size_t j, std::size_t t) const noexcept {
        return static_cast<double>(value(i, j, t)) / static_cast<double>(length_);
    }

    std::span<const std::int32_t> raw() const noexcept { return values_; }

    friend bool operator==(const CorrelationSet&, const CorrelationSet&) = default;

private:
    std::size_t pair_offset(std::size_t i, std::size_t j) const noexcept {
        // Row-major upper triangle: row i starts after i*n - i*(i-1)/2 pairs.
        return (i * codes_ - i * (i - 1) / 2 + (j - i)) * length_;
    }

    std::size_t codes_;
    std::size_t length_;
    std::vector<std::int32_t> values_;
};

/// Direct O(n^2 T^2) summation. The reference every faster path is checked
/// against.
CorrelationSet correlate_naive(const CodeMatrix& x);

/// Real-input FFT evaluation in O(n^2 T log T). Each inverse-transform output
/// is rounded to the nearest integer; a rounding residual above 1e-6 * T
/// throws NumericalError.
CorrelationSet correlate_fft(const CodeMatrix& x);

/// Updates `u` in place from the correlations of `x_pre` to those of
/// `x_pre` with entry idx negated. O(nT). `x_pre` must be the matrix before
/// the flip. Only pairs involving idx.code change.
void apply_flip(CorrelationSet& u, const CodeMatrix& x_pre, BitIndex idx);

struct Histogram {
    double lo = -1.0;
    double hi = 1.0;
    std::vector<std::uint64_t> counts;

    double bin_width() const noexcept { return (hi - lo) / static_cast<double>(counts.size()); }
};

/// Distribution of normalized correlations over the objective index set:
/// every shift of every pair i < j, plus nonzero shifts of each
/// autocorrelation. Standard deviation is the population one.
struct CorrelationStats {
    double max_abs = 0.0;
    double mean = 0.0;
    double std = 0.0;
    std::size_t count = 0;
    Histogram histogram;
};

/// Size of the objective index set, T(n^2 + n)/2 - n.
constexpr std::size_t index_set_size(std::size_t codes, std::size_t length) noexcept {
    return length * (codes * codes + codes) / 2 - codes;
}

CorrelationStats correlation_stats(const CorrelationSet& u, std::size_t bins = 201);

} // namespace dcor
