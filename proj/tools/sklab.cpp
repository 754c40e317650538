#include "sklab/cli.hpp"

int main(int argc, char** argv) { return sklab::run_cli(argc, argv); }
