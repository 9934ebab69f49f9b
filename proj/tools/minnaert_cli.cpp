#include <iostream>

#include "minnaert/cli.hpp"

int main(int argc, char** argv) { return minnaert::cli::run(argc, argv, std::cout, std::cerr); }
