#include "cli.hpp"

#include <csignal>
#include <iostream>

namespace {

extern "C" void on_signal(int) { dcor::cli::request_stop(); }

} // namespace

int main(int argc, char** argv) {
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    return dcor::cli::run(argc, argv, std::cout, std::cerr);
}
