#include "lanesafe/harness/cli.hpp"

int main(int argc, char** argv) { return lanesafe::harness::run_cli(argc, argv); }
