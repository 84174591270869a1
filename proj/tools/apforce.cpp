#include <iostream>

#include "apforce/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return apforce::cli::run(args, std::cout, std::cerr);
}
