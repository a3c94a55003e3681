#include <iostream>

#include "foldgan/cli.hpp"

int main(int argc, char** argv) { return foldgan::cli::run(argc, argv, std::cout, std::cerr); }
