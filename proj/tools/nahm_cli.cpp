#include <iostream>

#include "nahm/cli.hpp"

int main(int argc, char** argv) { return nahm::run(argc, argv, std::cout, std::cerr); }
