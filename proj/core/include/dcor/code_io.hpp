#pragma once

#include "dcor/code_matrix.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>

namespace dcor {

// Two on-disk forms of a code family, both 0-based in code and chip order.
//
// csv: one code per line, comma-separated "1" / "-1" tokens.
// prn: 16-byte header ("DCOR", then version, codes, length as little-endian
//      u32), followed by ceil(length / 8) bytes per code. Bit 1 encodes +1,
//      bits are packed MSB-first, padding bits in the final byte are zero.
enum class CodeFormat { Csv, Prn };

inline constexpr std::uint32_t kPrnVersion = 1;

void write_csv(std::ostream& out, const CodeMatrix& x);
CodeMatrix read_csv(std::istream& in);

void write_prn(std::ostream& out, const CodeMatrix& x);
CodeMatrix read_prn(std::istream& in);

/// Parses "csv" / "prn".
std::optional<CodeFormat> parse_code_format(std::string_view name);
std::string_view extension(CodeFormat format);

void save_codes(const std::filesystem::path& path, const CodeMatrix& x, CodeFormat format);

/// Loads either format; the packed form is recognised by its magic bytes.
CodeMatrix load_codes(const std::filesystem::path& path);

} // namespace dcor
