#ifndef FINSENT_TOOLS_CLI_H_
#define FINSENT_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace finsent::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitUsage = 64;

// Runs one subcommand. `args` excludes the program name. Reports go to
// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace finsent::cli

#endif  // FINSENT_TOOLS_CLI_H_
