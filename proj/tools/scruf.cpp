#include <iostream>

#include "scruf/cli.hpp"

int main(int argc, char** argv) { return scruf::run_cli(argc, argv, std::cout, std::cerr); }
