#include <iostream>

#include "pdcswap/cli.hpp"

int main(int argc, char** argv) { return pdcswap::cli::run(argc, argv, std::cout, std::cerr); }
