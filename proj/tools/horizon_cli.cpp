#include <iostream>

#include "horizon/cli.hpp"

int main(int argc, char** argv) { return horizon::cli::run(argc, argv, std::cout, std::cerr); }
