#include "cli.hpp"

int main(int argc, char** argv) { return meshpoc::cli::run(argc, argv); }
