#include <iostream>

#include "sectoria/cli.hpp"

int main(int argc, char** argv) { return sectoria::run_cli(argc, argv, std::cout, std::cerr); }
