#include <iostream>

#include "hfavg/cli.hpp"

int main(int argc, char** argv) { return hfavg::run_cli(argc, argv, std::cout, std::cerr); }
