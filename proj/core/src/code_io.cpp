#include "dcor/code_io.hpp"

#include "dcor/error.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace dcor {
namespace {

constexpr std::array<char, 4> kMagic = {'D', 'C', 'O', 'R'};

void put_u32(std::ostream& out, std::uint32_t v) {
    const char bytes[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                           static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
    out.write(bytes, 4);
}

std::uint32_t get_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

} // namespace

void write_csv(std::ostream& out, const CodeMatrix& x) {
    std::string line;
    for (std::size_t i = 0; i < x.codes(); ++i) {
        line.clear();
        for (std::size_t t = 0; t < x.length(); ++t) {
            if (t) line += ',';
            line += x(i, t) > 0 ? "1" : "-1";
        }
        line += '\n';
        out << line;
    }
}

CodeMatrix read_csv(std::istream& in) {
    std::vector<std::vector<int>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty()) continue;
        std::vector<int> row;
        std::size_t start = 0;
        while (true) {
            const auto comma = body.find(',', start);
            const auto token = trim(body.substr(start, comma == std::string_view::npos
                                                           ? std::string_view::npos
                                                           : comma - start));
            if (token == "1" || token == "+1") {
                row.push_back(1);
            } else if (token == "-1") {
                row.push_back(-1);
            } else {
                throw FormatError("line " + std::to_string(line_no) + ": token '" +
                                  std::string(token) + "' is not -1 or 1");
            }
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw FormatError("line " + std::to_string(line_no) + ": code has " +
                              std::to_string(row.size()) + " chips, expected " +
                              std::to_string(rows.front().size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw FormatError("code file contains no codes");
    if (rows.front().size() < 2) throw FormatError("codes must have at least 2 chips");
    return CodeMatrix::from_rows(rows);
}

void write_prn(std::ostream& out, const CodeMatrix& x) {
    out.write(kMagic.data(), kMagic.size());
    put_u32(out, kPrnVersion);
    put_u32(out, static_cast<std::uint32_t>(x.codes()));
    put_u32(out, static_cast<std::uint32_t>(x.length()));
    const std::size_t row_bytes = (x.length() + 7) / 8;
    std::vector<char> packed(row_bytes);
    for (std::size_t i = 0; i < x.codes(); ++i) {
        std::fill(packed.begin(), packed.end(), 0);
        for (std::size_t t = 0; t < x.length(); ++t)
            if (x(i, t) > 0) packed[t / 8] = static_cast<char>(packed[t / 8] | (0x80 >> (t % 8)));
        out.write(packed.data(), static_cast<std::streamsize>(row_bytes));
    }
}

CodeMatrix read_prn(std::istream& in) {
    unsigned char header[16];
    if (!in.read(reinterpret_cast<char*>(header), sizeof header))
        throw FormatError("truncated header");
    if (std::memcmp(header, kMagic.data(), kMagic.size()) != 0) throw FormatError("bad magic");
    const auto version = get_u32(header + 4);
    if (version != kPrnVersion) throw FormatError("unsupported version " + std::to_string(version));
    const std::size_t codes = get_u32(header + 8);
    const std::size_t length = get_u32(header + 12);
    if (codes < 1 || length < 2) throw FormatError("invalid dimensions in header");

    CodeMatrix x(codes, length);
    const std::size_t row_bytes = (length + 7) / 8;
    std::vector<unsigned char> packed(row_bytes);
    for (std::size_t i = 0; i < codes; ++i) {
        if (!in.read(reinterpret_cast<char*>(packed.data()), static_cast<std::streamsize>(row_bytes)))
            throw FormatError("truncated body at code " + std::to_string(i));
        for (std::size_t t = 0; t < length; ++t)
            if (!(packed[t / 8] & (0x80 >> (t % 8)))) x.flip_unchecked({i, t});
    }
    if (in.peek() != std::char_traits<char>::eof())
        throw FormatError("trailing bytes after " + std::to_string(codes) + " codes");
    return x;
}

std::optional<CodeFormat> parse_code_format(std::string_view name) {
    if (name == "csv") return CodeFormat::Csv;
    if (name == "prn") return CodeFormat::Prn;
    return std::nullopt;
}

std::string_view extension(CodeFormat format) {
    return format == CodeFormat::Csv ? "csv" : "prn";
}

void save_codes(const std::filesystem::path& path, const CodeMatrix& x, CodeFormat format) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    if (format == CodeFormat::Csv)
        write_csv(out, x);
    else
        write_prn(out, x);
    out.flush();
    if (!out) throw Error("write failed: " + path.string());
}

CodeMatrix load_codes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    char magic[4] = {};
    in.read(magic, 4);
    const bool packed = in.gcount() == 4 && std::memcmp(magic, kMagic.data(), 4) == 0;
    in.clear();
    in.seekg(0);
    return packed ? read_prn(in) : read_csv(in);
}

} // namespace dcor
