#include <iostream>

#include "softcover_cli/cli.hpp"

int main(int argc, char** argv) { return softcover::cli::run(argc, argv, std::cout, std::cerr); }
