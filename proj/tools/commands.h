#ifndef SPOOFSIM_TOOLS_COMMANDS_H_
#define SPOOFSIM_TOOLS_COMMANDS_H_

#include <string>
#include <vector>

namespace spoofsim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataFailure = 1;
inline constexpr int kExitUsage = 2;

// Parses and runs one spoofsim invocation; args exclude the program name.
int Run(const std::vector<std::string>& args);

}  // namespace spoofsim::cli

#endif  // SPOOFSIM_TOOLS_COMMANDS_H_
