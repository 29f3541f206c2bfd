#include "dislokit/cli.hpp"

int main(int argc, char** argv) { return dislokit::run_cli(argc, argv); }
