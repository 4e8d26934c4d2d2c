#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wbansim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

// Entry point of the command-line tool, with injectable streams for tests.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wbansim
