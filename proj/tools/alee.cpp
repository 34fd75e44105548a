#include <iostream>

#include "alee/cli.hpp"

int main(int argc, char** argv) { return alee::cli::run(argc, argv, std::cout, std::cerr); }
