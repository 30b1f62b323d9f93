#include <iostream>

#include "asd/cli.hpp"

int main(int argc, char** argv) { return asd::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr); }
