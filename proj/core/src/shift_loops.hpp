#pragma once

#include <cstddef>

namespace dcor::detail {

// Visits every shift t in [0, len) together with the partner chip k, where
// k = (b + t) mod len (Forward) or k = (b - t) mod len (Backward). The loops
// are split at the wrap point so the body never computes a modulus.
template <class Body>
inline void for_each_shift_forward(std::size_t b, std::size_t len, Body&& body) {
    const std::size_t split = len - b;
    for (std::size_t t = 0; t < split; ++t) body(t, b + t);
    for (std::size_t t = split; t < len; ++t) body(t, b + t - len);
}

template <class Body>
inline void for_each_shift_backward(std::size_t b, std::size_t len, Body&& body) {
    for (std::size_t t = 0; t <= b; ++t) body(t, b - t);
    for (std::size_t t = b + 1; t < len; ++t) body(t, b + len - t);
}

inline std::size_t wrap_add(std::size_t b, std::size_t t, std::size_t len) {
    return b + t < len ? b + t : b + t - len;
}

inline std::size_t wrap_sub(std::size_t b, std::size_t t, std::size_t len) {
    return t <= b ? b - t : b + len - t;
}

} // namespace dcor::detail
