#include <iostream>

#include "g3eq/cli.hpp"

int main(int argc, char **argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return g3eq::run(args, std::cout, std::cerr);
}
