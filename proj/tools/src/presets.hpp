#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace dcor::cli {

struct Preset {
    std::string_view name;
    std::size_t codes;
    std::size_t length;
};

// GNSS signal families: GPS L1 C/A, Galileo E1, GPS L1C.
inline constexpr std::array<Preset, 3> kPresets{{
    {"gps-l1ca", 63, 1023},
    {"galileo-e1", 100, 4092},
    {"gps-l1c", 210, 10230},
}};

inline std::optional<Preset> find_preset(std::string_view name) {
    for (const auto& p : kPresets)
        if (p.name == name) return p;
    return std::nullopt;
}

} // namespace dcor::cli
