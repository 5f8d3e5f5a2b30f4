#pragma once

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <string>

namespace dcor::cli {

/// Line-delimited JSON sink. Every line goes out in one write and is flushed
/// straight away, so a killed run leaves a file that parses line by line.
class TraceWriter {
public:
    explicit TraceWriter(const std::filesystem::path& path);
    ~TraceWriter();

    TraceWriter(const TraceWriter&) = delete;
    TraceWriter& operator=(const TraceWriter&) = delete;

    void write(const nlohmann::json& line);

private:
    std::FILE* file_;
    std::string buffer_;
};

} // namespace dcor::cli
