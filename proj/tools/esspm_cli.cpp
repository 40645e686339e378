#include "esspm/cli.hpp"

int main(int argc, char** argv) { return esspm::cli_main(argc, argv); }
