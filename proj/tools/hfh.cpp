#include "hfh/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return hfh::run_command(argc, argv, std::cout, std::cerr); }
