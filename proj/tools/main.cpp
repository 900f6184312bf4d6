#include "clockforge/cli.hpp"

#include <iostream>

int main(int argc, char **argv) { return clockforge::cli::run(argc, argv, std::cout, std::cerr); }
