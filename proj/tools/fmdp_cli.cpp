#include <iostream>

#include "fmdp/cli.hpp"

int main(int argc, char** argv) {
    return fmdp::run_cli(argc, argv, std::cout, std::cerr);
}
