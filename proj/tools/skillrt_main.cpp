#include "skillrt/runner/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return skillrt::app::run_cli(argc, argv, std::cout, std::cerr); }
