#include "pctl/cli.hpp"

int main(int argc, char** argv) { return pctl::cli::run(argc, argv); }
