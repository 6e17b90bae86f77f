#include <iostream>

#include "otoc/cli/commands.hpp"

int main(int argc, char** argv) { return otoc::cli::run(argc, argv, std::cout, std::cerr); }
