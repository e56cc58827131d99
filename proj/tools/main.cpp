#include <iostream>

#include "freecp/cli.hpp"

int main(int argc, char** argv) { return freecp::cli::run(argc, argv, std::cout, std::cerr); }
