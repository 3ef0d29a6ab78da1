#include <iostream>

#include "blochmca/commands.hpp"

int main(int argc, char** argv) {
    return blochmca::run_cli(argc, argv, std::cout, std::cerr);
}
