#include <iostream>

#include "rlsad/cli.hpp"

int main(int argc, char **argv)
{
	return rlsad::cli::run(argc, argv, std::cout, std::cerr);
}
