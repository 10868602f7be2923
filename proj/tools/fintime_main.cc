#include <iostream>

#include "fintime/cli.hpp"

int main(int argc, char** argv) { return fintime::cli_run(argc, argv, std::cout, std::cerr); }
