#ifndef SCHEDCOMM_CLI_HPP
#define SCHEDCOMM_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace schedcomm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitInfeasible = 3;

/// Entry point shared by the binary and the tests. `args` excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace schedcomm::cli

#endif
