#include "cli.hpp"

#include <iostream>

int main(int argc, char **argv) { return isoflow::main_with_args(argc, argv, std::cout, std::cerr); }
