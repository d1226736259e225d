#pragma once

#include <string>
#include <vector>

namespace csmri {

// Exit code 0 on success, 2 on usage errors, 1 on other failures.
auto cli_main(int argc, char **argv) -> int;
// Same, with the arguments after the program name.
auto run_cli(std::vector<std::string> args) -> int;

} // namespace csmri
