#include "factorgroup/cli.hpp"

int main(int argc, char** argv) { return factorgroup::cli_main(argc, argv); }
