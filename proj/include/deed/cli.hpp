#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace deed::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

/// Environment variable naming the directory for relative output paths.
inline constexpr const char* kOutputDirEnv = "DEED_OUTPUT_DIR";

/// Runs one command line. `args` excludes the program name. Data goes to
/// `out` or files, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cli_main(int argc, char** argv);

}  // namespace deed::cli
