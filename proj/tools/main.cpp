#include <iostream>

#include "calgap/cli.hpp"

int main(int argc, char **argv) { return calgap::run_cli(argc, argv, std::cout, std::cerr); }
