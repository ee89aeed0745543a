#include <iostream>

#include "tca_app/cli.hpp"

int main(int argc, char** argv) { return tca::app::run(argc, argv, std::cerr); }
