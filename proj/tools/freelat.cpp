#include "freelat/cli.hpp"

int main(int argc, char** argv) { return freelat::cli::run_cli(argc, argv); }
