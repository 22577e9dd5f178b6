#include "pevca/cli.hpp"

int main(int argc, char** argv) { return pevca::run_cli(argc, argv); }
