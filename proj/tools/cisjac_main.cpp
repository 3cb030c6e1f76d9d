#include "cisjac/cli.hpp"

int main(int argc, char** argv) { return cisjac::run_cli(argc, argv); }
