#include <iostream>

#include "qpnls/cli/commands.hpp"

int main(int argc, char** argv) { return qpnls::cli::main(argc, argv, std::cout, std::cerr); }
