#include "structcov/cli.hpp"

int main(int argc, char** argv) { return structcov::run_cli(argc, argv); }
