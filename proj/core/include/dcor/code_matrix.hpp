#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dcor {

/// Position of one chip in a code family. Both axes are 0-based.
struct BitIndex {
    std::size_t code = 0;
    std::size_t chip = 0;

    friend auto operator<=>(const BitIndex&, const BitIndex&) = default;
};

/// A family of `codes` binary spreading codes, each `length` chips long.
///
/// Entries are stored as signed bytes holding exactly -1 or +1, one row per
/// code. Rows are contiguous so correlation kernels can stream over chips.
class CodeMatrix {
public:
    /// All-ones family. Requires codes >= 1 and length >= 2.
    CodeMatrix(std::size_t codes, std::size_t length);

    /// Builds a family from explicit rows of -1/+1 values.
    static CodeMatrix from_rows(const std::vector<std::vector<int>>& rows);

    std::size_t codes() const noexcept { return codes_; }
    std::size_t length() const noexcept { return length_; }
    std::size_t size() const noexcept { return chips_.size(); }

    std::int8_t operator()(std::size_t code, std::size_t chip) const noexcept {
        return chips_[code * length_ + chip];
    }
    std::int8_t at(BitIndex idx) const;

    std::span<const std::int8_t> row(std::size_t code) const noexcept {
        return {chips_.data() + code * length_, length_};
    }
    std::span<const std::int8_t> data() const noexcept { return chips_; }

    /// Sets one entry; value must be -1 or +1.
    void set(BitIndex idx, int value);

    /// Negates entry idx. Out-of-range indices throw InvalidArgument.
    void flip(BitIndex idx);

    /// Negates entry idx without bounds checking.
    void flip_unchecked(BitIndex idx) noexcept {
        auto& v = chips_[idx.code * length_ + idx.chip];
        v = static_cast<std::int8_t>(-v);
    }

    bool contains(BitIndex idx) const noexcept {
        return idx.code < codes_ && idx.chip < length_;
    }

    friend bool operator==(const CodeMatrix&, const CodeMatrix&) = default;

private:
    std::size_t codes_;
    std::size_t length_;
    std::vector<std::int8_t> chips_;
};

/// Negates entry idx in place.
inline void flip_bit(CodeMatrix& x, BitIndex idx) { x.flip(idx); }

/// Independent fair +-1 entries from the Init stream of `seed`.
CodeMatrix random_code_matrix(std::size_t codes, std::size_t length, std::uint64_t seed);

struct ConstraintSpec {
    bool balanced = false; // equal counts of -1 and +1 in every code
    bool acz = false;      // shift-1 autocorrelation sidelobe zero

    bool any() const noexcept { return balanced || acz; }
};

/// Throws InfeasibleError when no length-`length` code can satisfy `spec`:
/// balanced needs even length; acz needs length % 4 != 2, because the
/// unnormalized shift-1 autocorrelation of a +-1 cycle is always congruent
/// to the length modulo 4.
void validate_constraints(const ConstraintSpec& spec, std::size_t length);

/// Sum of the chips of one code.
long row_sum(std::span<const std::int8_t> code) noexcept;

/// Unnormalized periodic shift-1 autocorrelation, sum_t x[t] * x[t-1 mod T].
long shift1_autocorrelation(std::span<const std::int8_t> code) noexcept;

/// Whether an unnormalized shift-1 value meets the sidelobe-zero target:
/// 0 for even lengths, +-1 for odd lengths.
bool acz_satisfied(long shift1, std::size_t length) noexcept;

struct CodeConstraintStatus {
    long row_sum = 0;
    long shift1 = 0;
    bool balanced_ok = true;
    bool acz_ok = true;
};

struct ConstraintReport {
    std::vector<CodeConstraintStatus> codes;

    bool all_ok() const noexcept;
};

/// Per-code audit. Checks that are not requested in `spec` always pass; the
/// raw row sum and shift-1 value are reported either way.
ConstraintReport check_constraints(const CodeMatrix& x, const ConstraintSpec& spec);

} // namespace dcor
