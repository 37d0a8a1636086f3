#include "ascan/cli_io.hpp"

int main(int argc, char** argv) { return ascan::run_cli(argc, argv); }
