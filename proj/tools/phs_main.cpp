#include "phs/harness.hpp"

int main(int argc, char** argv) { return phs::cli_main(argc, argv); }
