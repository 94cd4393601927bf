#ifndef CREW_TOOLS_CLI_HPP_
#define CREW_TOOLS_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace crew {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

// args excludes the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace crew

#endif  // CREW_TOOLS_CLI_HPP_
