#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cae::cli {

// Runs one subcommand. args excludes the program name. Returns the exit code:
// 0 on success or help, 2 on bad usage, 1 on a runtime failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

// Directory an artifact-producing command writes to when --out is absent.
std::string default_output_dir(const std::string& command);

}  // namespace cae::cli
