#include <iostream>

#include "meroloc/cli/commands.hpp"

int main(int argc, char** argv) { return meroloc::cli::run(argc, argv, std::cout, std::cerr); }
