#include <iostream>
#include <string>
#include <vector>

#include "ftbdd/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return ftbdd::cli::runCommandLine(args, std::cout, std::cerr);
}
