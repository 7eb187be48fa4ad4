#include "kronlap/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return kronlap::cli::run(argc, argv, std::cout, std::cerr);
}
