#include <iostream>

#include "jdd/cli.hpp"

int main(int argc, char** argv) { return jdd::cli::run(argc, argv, std::cout, std::cerr); }
