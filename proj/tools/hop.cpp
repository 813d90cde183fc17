#include <iostream>

#include "hop/runtime.hpp"

int main(int argc, char** argv) { return hop::cliMain(argc, argv, std::cout, std::cerr); }
