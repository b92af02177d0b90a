#include <iostream>

#include "locsvm/cli.hpp"

int main(int argc, char** argv) { return locsvm::cli::run(argc, argv, std::cout, std::cerr); }
