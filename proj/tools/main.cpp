#include <iostream>

#include "denseset/cli.hpp"

int main(int argc, char** argv) { return denseset::cli::run(argc, argv, std::cout, std::cerr); }
