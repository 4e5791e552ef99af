#include <iostream>

#include "latchbench/orchestrator/cli.hpp"

int main(int argc, char** argv) { return latchbench::orchestrator::run_cli(argc, argv, std::cout, std::cerr); }
