#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pevca {

// Command-line driver: subcommands run, compare, sweep. Returns the process
// exit code. The vector form exists so tests can drive the CLI in-process.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace pevca
