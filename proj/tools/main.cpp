#include <unistd.h>

#include <iostream>

#include "prox/cli/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return prox::cli::runCli(args, std::cout, std::cerr, isatty(STDOUT_FILENO) != 0);
}
