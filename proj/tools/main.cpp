#include <iostream>

#include "lamexp/cli.hpp"

int main(int argc, char** argv) { return lamexp::cli::run(argc, argv, std::cout, std::cerr); }
