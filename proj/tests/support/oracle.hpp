#pragma once

// Reference implementations written straight from the definitions, sharing no
// code with the library beyond CodeMatrix storage.

#include "dcor/code_matrix.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace oracle {

// full[i][j][t] = sum_tau x[i][tau] * x[j][(tau - t) mod T], every ordered pair.
struct FullCorrelation {
    std::size_t n = 0;
    std::size_t len = 0;
    std::vector<long> values;

    long operator()(std::size_t i, std::size_t j, std::size_t t) const { return values[(i * n + j) * len + t]; }
};

inline FullCorrelation correlate(const dcor::CodeMatrix& x) {
    FullCorrelation c{x.codes(), x.length(), {}};
    c.values.assign(c.n * c.n * c.len, 0);
    for (std::size_t i = 0; i < c.n; ++i)
        for (std::size_t j = 0; j < c.n; ++j)
            for (std::size_t t = 0; t < c.len; ++t) {
                long s = 0;
                for (std::size_t tau = 0; tau < c.len; ++tau)
                    s += long{x(i, tau)} * long{x(j, (tau + c.len - t) % c.len)};
                c.values[(i * c.n + j) * c.len + t] = s;
            }
    return c;
}

template <class F>
void for_each_indexed(const FullCorrelation& c, F&& f) {
    for (std::size_t i = 0; i < c.n; ++i)
        for (std::size_t j = i; j < c.n; ++j)
            for (std::size_t t = (i == j ? 1 : 0); t < c.len; ++t) f(c(i, j, t));
}

// Sum of |u|^p over the index set for integer p, exact. Divide by T^p to get
// the objective.
__extension__ typedef __int128 i128;

inline i128 scaled_objective(const FullCorrelation& c, int p) {
    i128 total = 0;
    for_each_indexed(c, [&](long u) {
        i128 term = 1;
        const i128 a = u < 0 ? -u : u;
        for (int e = 0; e < p; ++e) term *= a;
        total += term;
    });
    return total;
}

inline long double objective(const dcor::CodeMatrix& x, double p) {
    const auto c = correlate(x);
    const long double len = static_cast<long double>(x.length());
    if (p == std::floor(p) && p <= 8) {
        long double denom = 1;
        for (int e = 0; e < static_cast<int>(p); ++e) denom *= len;
        return static_cast<long double>(scaled_objective(c, static_cast<int>(p))) / denom;
    }
    long double total = 0;
    for_each_indexed(c, [&](long u) { total += std::pow(std::fabs(static_cast<long double>(u) / len), p); });
    return total;
}

inline long double delta(const dcor::CodeMatrix& x, dcor::BitIndex idx, double p) {
    auto flipped = x;
    flipped.flip(idx);
    return objective(flipped, p) - objective(x, p);
}

// Relative closeness with an absolute floor for values near zero.
inline bool close(long double actual, long double expected, long double rel = 1e-9L, long double abs = 1e-12L) {
    const long double diff = std::fabs(actual - expected);
    return diff <= abs || diff <= rel * std::fabs(expected);
}

} // namespace oracle
