#include "avsal/cli.hpp"

int main(int argc, char** argv) { return avsal::run_cli(argc, argv); }
