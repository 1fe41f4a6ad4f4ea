#include "dmind/cli.hpp"

int main(int argc, char** argv) { return dmind::run_cli(argc, argv); }
