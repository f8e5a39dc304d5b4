#include <iostream>

#include "wkit/cli.hpp"

int main(int argc, char** argv) { return wkit::run_cli(argc, argv, std::cout, std::cerr); }
