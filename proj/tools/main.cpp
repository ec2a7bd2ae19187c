#include <iostream>

#include "curvinv/cli/cli.hpp"

int main(int argc, char** argv) { return curvinv::cli::main(argc, argv, std::cout, std::cerr); }
