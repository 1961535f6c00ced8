#include "magzak/cli_runner.hpp"

int main(int argc, char** argv) { return magzak::run_cli(argc, argv); }
