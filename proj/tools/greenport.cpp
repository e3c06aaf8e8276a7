#include <iostream>

#include "greenport/cli/commands.hpp"

int main(int argc, char** argv) { return greenport::cli::run_cli(argc, argv, std::cout, std::cerr); }
