#include <iostream>

#include "critobs/cli.hpp"

int main(int argc, char** argv) { return critobs::cli::run(argc, argv, std::cout, std::cerr); }
