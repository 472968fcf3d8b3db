#include "rmtx/harness/cli.hpp"

int main(int argc, char** argv) { return rmtx::cli_main(argc, argv); }
