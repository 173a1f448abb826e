#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return radmon::cli::run(argc, argv, std::cout); }
