#include "dcforge/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return dcforge::cli::run(argc, argv, std::cout, std::cerr); }
