#include "scoutnd/cli.hpp"

int main(int argc, char** argv) { return scoutnd::cli::run_cli(argc, argv); }
