#include <iostream>

#include "lrflow_cli/scenario.hpp"

int main(int argc, char** argv) { return lrflow::cli::main_entry(argc, argv, std::cout, std::cerr); }
