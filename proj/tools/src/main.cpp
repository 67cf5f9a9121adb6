#include <iostream>

#include "ocecal_cli/cli.hpp"

int main(int argc, char** argv) { return ocecal::cli::run_cli(argc, argv, std::cout, std::cerr); }
