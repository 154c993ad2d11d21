#include "qes/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return qes::cli::run(argc, argv, std::cout, std::cerr); }
