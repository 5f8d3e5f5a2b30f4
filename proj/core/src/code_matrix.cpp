#include "dcor/code_matrix.hpp"

#include "dcor/error.hpp"
#include "dcor/rng.hpp"

#include <algorithm>
#include <string>

namespace dcor {

CodeMatrix::CodeMatrix(std::size_t codes, std::size_t length)
    : codes_(codes), length_(length) {
    if (codes < 1) throw InvalidArgument("code family needs at least one code");
    if (length < 2) throw InvalidArgument("code length must be at least 2");
    chips_.assign(codes * length, 1);
}

CodeMatrix CodeMatrix::from_rows(const std::vector<std::vector<int>>& rows) {
    if (rows.empty()) throw InvalidArgument("code family needs at least one code");
    CodeMatrix x(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != x.length_)
            throw InvalidArgument("code " + std::to_string(i) + " has length " +
                                  std::to_string(rows[i].size()) + ", expected " +
                                  std::to_string(x.length_));
        for (std::size_t t = 0; t < x.length_; ++t) x.set({i, t}, rows[i][t]);
    }
    return x;
}

std::int8_t CodeMatrix::at(BitIndex idx) const {
    if (!contains(idx)) throw InvalidArgument("bit index out of range");
    return (*this)(idx.code, idx.chip);
}

void CodeMatrix::set(BitIndex idx, int value) {
    if (!contains(idx)) throw InvalidArgument("bit index out of range");
    if (value != 1 && value != -1) throw InvalidArgument("code entries must be -1 or +1");
    chips_[idx.code * length_ + idx.chip] = static_cast<std::int8_t>(value);
}

void CodeMatrix::flip(BitIndex idx) {
    if (!contains(idx)) throw InvalidArgument("bit index out of range");
    flip_unchecked(idx);
}

CodeMatrix random_code_matrix(std::size_t codes, std::size_t length, std::uint64_t seed) {
    CodeMatrix x(codes, length);
    Rng rng(seed, Rng::Stream::Init);
    for (std::size_t i = 0; i < codes; ++i)
        for (std::size_t t = 0; t < length; ++t)
            if (rng.coin()) x.flip_unchecked({i, t});
    return x;
}

void validate_constraints(const ConstraintSpec& spec, std::size_t length) {
    if (spec.balanced && length % 2 != 0)
        throw InfeasibleError("balanced codes need an even length, got " + std::to_string(length));
    if (spec.acz && length % 4 == 2)
        throw InfeasibleError("shift-1 sidelobe zero is unreachable for length " +
                              std::to_string(length) + " (length = 2 mod 4)");
}

long row_sum(std::span<const std::int8_t> code) noexcept {
    long sum = 0;
    for (auto v : code) sum += v;
    return sum;
}

long shift1_autocorrelation(std::span<const std::int8_t> code) noexcept {
    const std::size_t len = code.size();
    long sum = static_cast<long>(code[0]) * code[len - 1];
    for (std::size_t t = 1; t < len; ++t) sum += static_cast<long>(code[t]) * code[t - 1];
    return sum;
}

bool acz_satisfied(long shift1, std::size_t length) noexcept {
    if (length % 2 == 0) return shift1 == 0;
    return shift1 == 1 || shift1 == -1;
}

bool ConstraintReport::all_ok() const noexcept {
    return std::all_of(codes.begin(), codes.end(),
                       [](const auto& c) { return c.balanced_ok && c.acz_ok; });
}

ConstraintReport check_constraints(const CodeMatrix& x, const ConstraintSpec& spec) {
    ConstraintReport report;
    report.codes.reserve(x.codes());
    for (std::size_t i = 0; i < x.codes(); ++i) {
        CodeConstraintStatus status;
        status.row_sum = row_sum(x.row(i));
        status.shift1 = shift1_autocorrelation(x.row(i));
        if (spec.balanced) status.balanced_ok = status.row_sum == 0;
        if (spec.acz) status.acz_ok = acz_satisfied(status.shift1, x.length());
        report.codes.push_back(status);
    }
    return report;
}

} // namespace dcor
