#include <iostream>

#include "gradpi/cli.hpp"

int main(int argc, char** argv) { return gradpi::cli::main(argc, argv, std::cin, std::cout, std::cerr); }
