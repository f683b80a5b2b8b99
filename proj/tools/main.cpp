#include <iostream>

#include "app.hpp"

int main(int argc, char** argv) { return modopo::app::main_cli(argc, argv, std::cout, std::cerr); }
