#include <iostream>

#include "netlisna/cli.hpp"

int main(int argc, char** argv) { return netlisna::run_cli(argc, argv, std::cout, std::cerr); }
