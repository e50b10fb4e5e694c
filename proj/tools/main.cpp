#include <iostream>

#include "ridge/cli.hpp"

int main(int argc, char** argv) { return ridge::cli::run(argc, argv, std::cout, std::cerr); }
