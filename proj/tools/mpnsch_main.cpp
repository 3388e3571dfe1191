#include "mpnsch/cli.hpp"

int main(int argc, char** argv) { return mpnsch::run_cli(argc, argv); }
