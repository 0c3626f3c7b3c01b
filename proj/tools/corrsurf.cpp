#include "corrsurf/cli/commands.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return corrsurf::cli::run(argc, argv, std::cout, std::cerr);
}
