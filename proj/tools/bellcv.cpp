#include "bellcv/cli.hpp"

int main(int argc, char** argv) { return bellcv::run_cli(argc, argv); }
