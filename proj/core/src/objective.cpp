#include "dcor/objective.hpp"

#include "dcor/error.hpp"
#include "power_kernels.hpp"
#include "shift_loops.hpp"

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>

#include <cmath>
#include <string>

namespace dcor {

using detail::for_each_shift_backward;
using detail::for_each_shift_forward;
using detail::wrap_add;
using detail::wrap_sub;

namespace {

// Unit roundoff doubled; the per-term error of a power plus the accumulated
// error of a sum of N terms, in any association order, stays below
// (N + 8) * kEps * (sum of term magnitudes).
constexpr double kEps = 0x1p-52;
// Extra ulps per term for evaluating the powers themselves.
constexpr std::size_t kPowerSlack = 16;

struct Accumulator {
    double sum = 0.0;
    double magnitude = 0.0;
    std::size_t terms = 0;

    DeltaEstimate estimate() const {
        return {sum, static_cast<double>(terms + kPowerSlack) * kEps * magnitude};
    }
};

void check_shapes(const CodeMatrix& x, const CorrelationSet& u, const PowerTable& table) {
    if (x.codes() != u.codes() || x.length() != u.length())
        throw InvalidArgument("code matrix and correlation set dimensions differ");
    if (table.length() != x.length())
        throw InvalidArgument("power table was built for a different code length");
}

// Adds the change of every shift of one stored pair when the flipped chip's
// partner in that pair is partner[(b - t) mod T] (Backward) or
// partner[(b + t) mod T].
template <bool Backward, class Pow>
void accumulate_pair(std::span<const std::int32_t> slab, std::span<const std::int8_t> partner, std::int32_t sign,
                     std::size_t b, Pow pw, Accumulator& acc) {
    const std::size_t len = slab.size();
    const std::int32_t* u = slab.data();
    const std::int8_t* xp = partner.data();
    if constexpr (Backward) {
        detail::accumulate_run<-1>(u, xp + b, b + 1, sign, pw, acc.sum, acc.magnitude);
        detail::accumulate_run<-1>(u + b + 1, xp + len - 1, len - b - 1, sign, pw, acc.sum, acc.magnitude);
    } else {
        detail::accumulate_run<1>(u, xp + b, len - b, sign, pw, acc.sum, acc.magnitude);
        detail::accumulate_run<1>(u + len - b, xp, b, sign, pw, acc.sum, acc.magnitude);
    }
    acc.terms += len;
}

template <class Pow>
void accumulate_auto(std::span<const std::int32_t> diag, std::span<const std::int8_t> xa, std::int32_t sign,
                     std::size_t b, Pow pw, Accumulator& acc) {
    const std::size_t len = diag.size();
    for (std::size_t t = 1; t < len; ++t) {
        const std::int32_t d = -2 * sign * (xa[wrap_add(b, t, len)] + xa[wrap_sub(b, t, len)]);
        if (d == 0) continue;
        const double after = pw(diag[t] + d);
        const double before = pw(diag[t]);
        acc.sum += after - before;
        acc.magnitude += after + before;
        ++acc.terms;
    }
}

} // namespace

void ObjectiveSpec::validate() const {
    if (!std::isfinite(p) || p < 1.0)
        throw InvalidArgument("objective exponent p must be finite and >= 1, got " + std::to_string(p));
}

PowerTable::PowerTable(const ObjectiveSpec& spec, std::size_t length)
    : p_(spec.p), length_(length), offset_(static_cast<std::int32_t>(length) + 1) {
    spec.validate();
    if (p_ == std::floor(p_) && p_ <= 8.0) integer_exponent_ = static_cast<int>(p_);
    if (length < 2) throw InvalidArgument("code length must be at least 2");
    power_.resize(length + 3);
    const double inv = 1.0 / static_cast<double>(length);
    for (std::size_t k = 0; k < power_.size(); ++k) {
        if (k == 0)
            power_[k] = 0.0;
        else if (k == length)
            power_[k] = 1.0;
        else
            power_[k] = std::pow(static_cast<double>(k) * inv, p_);
    }
    steps_.resize(2 * length + 3);
    for (std::int32_t w = -offset_; w <= offset_; ++w) {
        const double hi = power(w + 1);
        const double lo = power(w - 1);
        steps_[static_cast<std::size_t>(w + offset_)] = {hi - lo, hi + lo};
    }
}

double objective(const CorrelationSet& u, const PowerTable& table) {
    if (table.length() != u.length())
        throw InvalidArgument("power table was built for a different code length");
    const std::size_t n = u.codes();
    const std::size_t len = u.length();
    std::vector<double> pair_sums(u.pair_count(), 0.0);
    tbb::parallel_for(std::size_t{0}, n, [&](std::size_t i) {
        std::size_t slot = i * n - i * (i - 1) / 2;
        for (std::size_t j = i; j < n; ++j, ++slot) {
            const auto slab = u.slab(i, j);
            double sum = 0.0;
            for (std::size_t t = (i == j ? 1 : 0); t < len; ++t) sum += table.power(slab[t]);
            pair_sums[slot] = sum;
        }
    });
    double total = 0.0;
    for (double s : pair_sums) total += s;
    return total;
}

double objective(const CorrelationSet& u, const ObjectiveSpec& spec) {
    return objective(u, PowerTable(spec, u.length()));
}

DeltaEstimate delta_estimate(const CodeMatrix& x, const CorrelationSet& u, BitIndex idx,
                             const PowerTable& table) {
    check_shapes(x, u, table);
    if (!x.contains(idx)) throw InvalidArgument("bit index out of range");
    const std::size_t n = x.codes();
    const std::size_t a = idx.code;
    const std::size_t b = idx.chip;
    const std::int32_t sign = x(a, b);

    return detail::with_power(table, [&](auto pw) {
        Accumulator acc;
        for (std::size_t i = 0; i < a; ++i) accumulate_pair<false>(u.slab(i, a), x.row(i), sign, b, pw, acc);
        for (std::size_t j = a + 1; j < n; ++j) accumulate_pair<true>(u.slab(a, j), x.row(j), sign, b, pw, acc);
        accumulate_auto(u.slab(a, a), x.row(a), sign, b, pw, acc);
        return acc.estimate();
    });
}

DeltaEstimate pair_delta(const CodeMatrix& x, const CorrelationSet& u, std::size_t code,
                         std::size_t chip_a, std::size_t chip_b, const PowerTable& table) {
    check_shapes(x, u, table);
    if (!x.contains({code, chip_a}) || !x.contains({code, chip_b}))
        throw InvalidArgument("bit index out of range");
    if (chip_a == chip_b) throw InvalidArgument("pair move needs two distinct chips");

    const std::size_t n = x.codes();
    const std::size_t len = x.length();
    const std::int32_t s1 = x(code, chip_a);
    const std::int32_t s2 = x(code, chip_b);

    Accumulator acc;
    auto add = [&](std::int32_t before_raw, std::int32_t change) {
        if (change == 0) return;
        const double after = table.power(before_raw + change);
        const double before = table.power(before_raw);
        acc.sum += after - before;
        acc.magnitude += after + before;
        ++acc.terms;
    };
    for (std::size_t i = 0; i < code; ++i) {
        const auto slab = u.slab(i, code);
        const auto xi = x.row(i);
        for (std::size_t t = 0; t < len; ++t)
            add(slab[t], -2 * (s1 * xi[wrap_add(chip_a, t, len)] + s2 * xi[wrap_add(chip_b, t, len)]));
    }
    for (std::size_t j = code + 1; j < n; ++j) {
        const auto slab = u.slab(code, j);
        const auto xj = x.row(j);
        for (std::size_t t = 0; t < len; ++t)
            add(slab[t], -2 * (s1 * xj[wrap_sub(chip_a, t, len)] + s2 * xj[wrap_sub(chip_b, t, len)]));
    }
    // Autocorrelation: the second flip sees the code with the first one applied.
    const auto xa = x.row(code);
    auto after_first = [&](std::size_t k) -> std::int32_t { return k == chip_a ? -xa[k] : xa[k]; };
    const auto diag = u.slab(code, code);
    for (std::size_t t = 1; t < len; ++t) {
        const std::int32_t d1 = -2 * s1 * (xa[wrap_add(chip_a, t, len)] + xa[wrap_sub(chip_a, t, len)]);
        const std::int32_t d2 =
            -2 * s2 * (after_first(wrap_add(chip_b, t, len)) + after_first(wrap_sub(chip_b, t, len)));
        add(diag[t], d1 + d2);
    }
    return acc.estimate();
}

DeltaMatrix delta_matrix_full(const CodeMatrix& x, const CorrelationSet& u, const PowerTable& table) {
    check_shapes(x, u, table);
    const std::size_t n = x.codes();
    const std::size_t len = x.length();
    DeltaMatrix deltas(n, len);
    tbb::parallel_for(tbb::blocked_range<std::size_t>(0, n * len), [&](const auto& range) {
        for (std::size_t e = range.begin(); e != range.end(); ++e) {
            const BitIndex idx{e / len, e % len};
            deltas(idx.code, idx.chip) = delta_estimate(x, u, idx, table).value;
        }
    });
    return deltas;
}

void update_delta_matrix(DeltaMatrix& deltas, CodeMatrix& x, CorrelationSet& u, BitIndex idx,
                         const PowerTable& table) {
    check_shapes(x, u, table);
    if (!x.contains(idx)) throw InvalidArgument("bit index out of range");
    if (deltas.codes() != x.codes() || deltas.length() != x.length())
        throw InvalidArgument("delta matrix dimensions differ from the code matrix");

    const std::size_t n = x.codes();
    const std::size_t len = x.length();
    const std::size_t a = idx.code;
    const std::size_t b = idx.chip;
    const std::int32_t s = x(a, b);

    const auto xa_pre = x.row(a);
    std::vector<std::int8_t> xa_post(xa_pre.begin(), xa_pre.end());
    xa_post[b] = static_cast<std::int8_t>(-xa_post[b]);

    // Other codes: only the pair with code a changed, so each entry moves by
    // the difference of that pair's terms before and after the flip.
    tbb::parallel_for(std::size_t{0}, n, [&](std::size_t other) {
        if (other == a) return;
        const auto xo = x.row(other);
        const bool other_first = other < a;
        const auto slab = other_first ? u.slab(other, a) : u.slab(a, other);

        std::vector<std::int32_t> post(len);
        if (other_first)
            for_each_shift_forward(b, len, [&](std::size_t t, std::size_t k) { post[t] = slab[t] - 2 * s * xo[k]; });
        else
            for_each_shift_backward(b, len, [&](std::size_t t, std::size_t k) { post[t] = slab[t] - 2 * s * xo[k]; });

        const std::int32_t* before = slab.data();
        const std::int32_t* after = post.data();
        const std::int8_t* pre_a = xa_pre.data();
        const std::int8_t* post_a = xa_post.data();
        auto row = deltas.row(other);
        detail::with_power(table, [&](auto pw) {
            for (std::size_t bp = 0; bp < len; ++bp) {
                const std::int32_t sp = xo[bp];
                double correction;
                // Flipping (other, bp) pairs it with chip bp - t of code a when
                // `other` is the first index of the stored pair, bp + t otherwise.
                if (other_first) {
                    correction = detail::correction_run<-1>(before, after, pre_a + bp, post_a + bp, bp + 1, sp, pw);
                    correction += detail::correction_run<-1>(before + bp + 1, after + bp + 1, pre_a + len - 1,
                                                             post_a + len - 1, len - bp - 1, sp, pw);
                } else {
                    correction = detail::correction_run<1>(before, after, pre_a + bp, post_a + bp, len - bp, sp, pw);
                    correction += detail::correction_run<1>(before + len - bp, after + len - bp, pre_a, post_a, bp,
                                                            sp, pw);
                }
                row[bp] += correction;
            }
        });
    });

    apply_flip(u, x, idx);
    x.flip_unchecked(idx);

    auto row = deltas.row(a);
    tbb::parallel_for(std::size_t{0}, len, [&](std::size_t bp) {
        row[bp] = delta_estimate(x, u, {a, bp}, table).value;
    });
}

} // namespace dcor
