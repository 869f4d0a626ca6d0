#include <iostream>

#include "synlstm/cli.hpp"

int main(int argc, char** argv) { return synlstm::run_cli(argc, argv, std::cout, std::cerr); }
