#include <csignal>
#include <iostream>
#include <string>
#include <vector>

#include "subring/census.hpp"
#include "subring/cli.hpp"

namespace {

void on_interrupt(int) { subring::census::request_cancel(); }

}  // namespace

int main(int argc, char** argv) {
    std::signal(SIGINT, on_interrupt);
    std::signal(SIGTERM, on_interrupt);
    std::vector<std::string> args(argv + 1, argv + argc);
    return subring::cli::run(args, std::cout, std::cerr);
}
