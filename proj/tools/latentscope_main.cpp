#include <iostream>

#include "latentscope/cli.hpp"

int main(int argc, char** argv) {
    return latentscope::run_cli(argc, argv, std::cout, std::cerr);
}
