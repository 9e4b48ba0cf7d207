#include "fdwlan/cli.hpp"

int main(int argc, char** argv) { return fdwlan::run_cli(argc, argv); }
