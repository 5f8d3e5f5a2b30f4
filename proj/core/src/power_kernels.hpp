#pragma once

#include "dcor/objective.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>

namespace dcor::detail {

template <int P>
constexpr double integer_power(double a) noexcept {
    if constexpr (P == 0) {
        return 1.0;
    } else if constexpr (P == 1) {
        return a;
    } else {
        const double half = integer_power<P / 2>(a);
        if constexpr (P % 2 == 1)
            return half * half * a;
        else
            return half * half;
    }
}

// |u / T|^P by repeated squaring, for exponents known at compile time.
template <int P>
struct IntegerPower {
    double inv_length;

    double operator()(std::int32_t u) const noexcept {
        double a = static_cast<double>(u) * inv_length;
        if constexpr (P % 2 == 1) a = std::fabs(a);
        return integer_power<P>(a);
    }
};

// Arbitrary real exponent via the precomputed table.
struct TablePower {
    const PowerTable* table;

    double operator()(std::int32_t u) const noexcept { return table->power(u); }
};

inline constexpr int kMaxIntegerKernel = 8;

// Calls f with the fastest power functor available for the table's exponent.
template <class F>
decltype(auto) with_power(const PowerTable& table, F&& f) {
    const double inv = 1.0 / static_cast<double>(table.length());
    switch (table.integer_exponent()) {
    case 1: return f(IntegerPower<1>{inv});
    case 2: return f(IntegerPower<2>{inv});
    case 3: return f(IntegerPower<3>{inv});
    case 4: return f(IntegerPower<4>{inv});
    case 5: return f(IntegerPower<5>{inv});
    case 6: return f(IntegerPower<6>{inv});
    case 7: return f(IntegerPower<7>{inv});
    case 8: return f(IntegerPower<8>{inv});
    default: return f(TablePower{&table});
    }
}

// Sum over i < count of pw(u[i] - 2c) - pw(u[i]) and of the matching
// magnitudes, with c = sign * x[Stride * i]. The translation unit is built
// with reassociation enabled so this reduction vectorizes; the lane order is
// fixed at compile time, so results do not depend on scheduling.
template <int Stride, class Pow>
inline void accumulate_run(const std::int32_t* u, const std::int8_t* x, std::size_t count, std::int32_t sign,
                           Pow pw, double& sum, double& magnitude) {
    double s = 0.0;
    double m = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const std::int32_t c = sign * x[Stride * static_cast<std::ptrdiff_t>(i)];
        const double after = pw(u[i] - 2 * c);
        const double before = pw(u[i]);
        s += after - before;
        m += after + before;
    }
    sum += s;
    magnitude += m;
}

// Change of the single-flip deltas of one chip when its pair slab moves from
// `before` to `after` and the partner code moves from `pre` to `post`:
// sum over i < count of [pw(after - 2c') - pw(after)] - [pw(before - 2c) - pw(before)],
// with c = sp * pre[Stride * i] and c' = sp * post[Stride * i].
template <int Stride, class Pow>
inline double correction_run(const std::int32_t* before, const std::int32_t* after, const std::int8_t* pre,
                             const std::int8_t* post, std::size_t count, std::int32_t sp, Pow pw) {
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const std::ptrdiff_t k = Stride * static_cast<std::ptrdiff_t>(i);
        const std::int32_t c_old = sp * pre[k];
        const std::int32_t c_new = sp * post[k];
        s += (pw(after[i] - 2 * c_new) - pw(after[i])) - (pw(before[i] - 2 * c_old) - pw(before[i]));
    }
    return s;
}

} // namespace dcor::detail
