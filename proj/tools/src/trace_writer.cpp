#include "trace_writer.hpp"

#include <stdexcept>

namespace dcor::cli {

TraceWriter::TraceWriter(const std::filesystem::path& path) : file_(std::fopen(path.c_str(), "wb")) {
    if (!file_) throw std::runtime_error("cannot open " + path.string() + " for writing");
}

TraceWriter::~TraceWriter() { std::fclose(file_); }

void TraceWriter::write(const nlohmann::json& line) {
    buffer_ = line.dump();
    buffer_.push_back('\n');
    if (std::fwrite(buffer_.data(), 1, buffer_.size(), file_) != buffer_.size() || std::fflush(file_) != 0)
        throw std::runtime_error("trace write failed");
}

} // namespace dcor::cli
