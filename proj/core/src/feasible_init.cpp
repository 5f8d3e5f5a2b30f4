#include "dcor/error.hpp"
#include "dcor/optimizer.hpp"
#include "shift_loops.hpp"

#include <string>

namespace dcor {
namespace {

using detail::wrap_add;
using detail::wrap_sub;

struct CodePenalty {
    const ConstraintSpec& spec;
    std::size_t length;

    long operator()(long sum, long shift1) const {
        long p = 0;
        if (spec.balanced) p += sum * sum;
        if (spec.acz) {
            // Odd lengths aim for the nearer of +-1; shift1 is odd there.
            const long miss = length % 2 == 0 ? shift1 : (shift1 < 0 ? -shift1 : shift1) - 1;
            p += miss * miss;
        }
        return p;
    }
};

// Penalty descent on one code, in place. Returns false if the budget ran out.
bool repair_code(std::vector<std::int8_t>& code, const CodePenalty& penalty, Rng& rng, std::size_t budget) {
    const std::size_t len = code.size();
    long sum = row_sum(code);
    long shift1 = shift1_autocorrelation(code);
    long current = penalty(sum, shift1);

    auto flip = [&](std::size_t b) {
        const long x = code[b];
        sum -= 2 * x;
        shift1 -= 2 * x * (code[wrap_add(b, 1, len)] + code[wrap_sub(b, 1, len)]);
        code[b] = static_cast<std::int8_t>(-x);
        current = penalty(sum, shift1);
    };

    for (std::size_t step = 0; step < budget && current > 0; ++step) {
        long best = 0;
        std::size_t best_chip = 0;
        std::uint64_t ties = 0;
        for (std::size_t b = 0; b < len; ++b) {
            const long x = code[b];
            const long next = penalty(sum - 2 * x,
                                      shift1 - 2 * x * (code[wrap_add(b, 1, len)] + code[wrap_sub(b, 1, len)]));
            if (ties == 0 || next < best) {
                best = next;
                best_chip = b;
                ties = 1;
            } else if (next == best && rng.below(++ties) == 0) {
                best_chip = b; // reservoir choice among equal moves
            }
        }
        // Improving or sideways moves follow the penalty; otherwise kick.
        flip(best <= current ? best_chip : static_cast<std::size_t>(rng.below(len)));
    }
    return current == 0;
}

} // namespace

CodeMatrix feasible_init(std::size_t codes, std::size_t length, const ConstraintSpec& constraints,
                         std::uint64_t seed, std::size_t max_flips_per_code) {
    validate_constraints(constraints, length);
    CodeMatrix x = random_code_matrix(codes, length, seed);
    if (!constraints.any()) return x;

    const std::size_t budget = max_flips_per_code ? max_flips_per_code : 100 * length + 1000;
    const CodePenalty penalty{constraints, length};
    Rng rng(seed, Rng::Stream::Repair);
    std::vector<std::int8_t> code(length);
    for (std::size_t a = 0; a < codes; ++a) {
        const auto row = x.row(a);
        code.assign(row.begin(), row.end());
        if (!repair_code(code, penalty, rng, budget))
            throw InfeasibleError("feasible initialization did not satisfy the constraints for code " +
                                  std::to_string(a) + " within " + std::to_string(budget) + " flips");
        for (std::size_t t = 0; t < length; ++t)
            if (code[t] != x(a, t)) x.flip_unchecked({a, t});
    }
    return x;
}

} // namespace dcor
