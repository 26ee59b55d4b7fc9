#include "cpf/cli/commands.hpp"

#include <iostream>

int main(int argc, char** argv) { return cpf::cli::run_app(argc, argv, std::cout, std::cerr); }
