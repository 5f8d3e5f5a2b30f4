#pragma once

#include "dcor/code_matrix.hpp"
#include "dcor/correlation.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dcor {

/// f(X) = sum over the index set of |Sigma_t(i,j)|^p.
struct ObjectiveSpec {
    double p = 6.0;

    /// Throws InvalidArgument unless p is finite and >= 1.
    void validate() const;
};

/// Lookup tables for |u / T|^p at every reachable unnormalized value u.
///
/// A single chip flip moves each affected correlation by exactly +-2, so the
/// term change can be read from one table: if a value u moves to u - 2c with
/// c = +-1, the change is -c * step(u - c), where
/// step(w) = |(w + 1)/T|^p - |(w - 1)/T|^p. `magnitude(w)` holds the sum of
/// the two powers and feeds the rounding-error bound of each delta.
class PowerTable {
public:
    PowerTable(const ObjectiveSpec& spec, std::size_t length);

    double p() const noexcept { return p_; }
    /// p itself when it is an integer in [1, 8], else 0. Such exponents get
    /// dedicated multiply-only kernels.
    int integer_exponent() const noexcept { return integer_exponent_; }
    std::size_t length() const noexcept { return length_; }

    double power(std::int32_t u) const noexcept { return power_[static_cast<std::size_t>(u < 0 ? -u : u)]; }

    struct Step {
        double step;
        double magnitude;
    };
    /// Valid for |w| <= length + 1.
    const Step& step(std::int32_t w) const noexcept { return steps_[static_cast<std::size_t>(w + offset_)]; }
    const Step* step_origin() const noexcept { return steps_.data() + offset_; }

private:
    double p_;
    int integer_exponent_ = 0;
    std::size_t length_;
    std::int32_t offset_;
    std::vector<double> power_;
    std::vector<Step> steps_;
};

/// f(X) from its correlation set. Pairs are summed independently and the
/// per-pair sums are combined in a fixed order, so the result does not depend
/// on the thread count.
double objective(const CorrelationSet& u, const PowerTable& table);
double objective(const CorrelationSet& u, const ObjectiveSpec& spec);

/// Objective change of a move together with a bound on its rounding error.
///
/// A move counts as improving only when `value < -error_bound`: an exact zero
/// (or anything indistinguishable from it in double precision) is rejected,
/// which keeps descent from cycling on ties.
struct DeltaEstimate {
    double value = 0.0;
    double error_bound = 0.0;

    bool improves() const noexcept { return value < -error_bound; }
};

/// f(X with idx flipped) - f(X), in O(nT), reading the would-be correlation
/// values on the fly without modifying `u`. `u` must be exact for `x`.
DeltaEstimate delta_estimate(const CodeMatrix& x, const CorrelationSet& u, BitIndex idx,
                             const PowerTable& table);

inline double delta(const CodeMatrix& x, const CorrelationSet& u, BitIndex idx,
                    const PowerTable& table) {
    return delta_estimate(x, u, idx, table).value;
}

/// Objective change of flipping two distinct chips of the same code.
DeltaEstimate pair_delta(const CodeMatrix& x, const CorrelationSet& u, std::size_t code,
                         std::size_t chip_a, std::size_t chip_b, const PowerTable& table);

/// Single-flip objective changes for every entry of a code family.
class DeltaMatrix {
public:
    DeltaMatrix(std::size_t codes, std::size_t length)
        : codes_(codes), length_(length), values_(codes * length, 0.0) {}

    std::size_t codes() const noexcept { return codes_; }
    std::size_t length() const noexcept { return length_; }

    double operator()(std::size_t code, std::size_t chip) const noexcept {
        return values_[code * length_ + chip];
    }
    double& operator()(std::size_t code, std::size_t chip) noexcept {
        return values_[code * length_ + chip];
    }
    double operator()(BitIndex idx) const noexcept { return (*this)(idx.code, idx.chip); }

    std::span<double> row(std::size_t code) noexcept { return {values_.data() + code * length_, length_}; }
    std::span<const double> row(std::size_t code) const noexcept {
        return {values_.data() + code * length_, length_};
    }
    std::span<const double> values() const noexcept { return values_; }

private:
    std::size_t codes_;
    std::size_t length_;
    std::vector<double> values_;
};

/// Every single-flip delta, O(n^2 T^2), parallel over entries.
DeltaMatrix delta_matrix_full(const CodeMatrix& x, const CorrelationSet& u, const PowerTable& table);

/// Commits the flip `idx` and brings the delta matrix along in O(n T^2).
///
/// On entry `deltas`, `x` and `u` describe the same state; on return all
/// three describe the state with idx flipped. Rows of other codes are
/// corrected using only the shifts of their pair with idx.code; the row of
/// idx.code itself is recomputed from scratch.
void update_delta_matrix(DeltaMatrix& deltas, CodeMatrix& x, CorrelationSet& u, BitIndex idx,
                         const PowerTable& table);

} // namespace dcor
