#include <iostream>

#include "net2rdm/cli.hpp"

int main(int argc, char** argv) { return net2rdm::cli::run(argc, argv, std::cout, std::cerr); }
