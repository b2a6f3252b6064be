#include <iostream>

#include "aid/cli/commands.hpp"

int main(int argc, char** argv) {
    return aid::cli::run(argc, argv, std::cout, std::cerr);
}
