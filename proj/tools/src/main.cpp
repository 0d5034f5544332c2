#include <iostream>

#include "pprx_cli/commands.hpp"

int main(int argc, char** argv) { return pprx::cli::run_cli(argc, argv, std::cout, std::cerr); }
