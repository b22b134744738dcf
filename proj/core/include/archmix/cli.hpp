#pragma once

#include <string>
#include <vector>

namespace archmix {

// Entry point behind the archmix binary; args exclude argv[0].
// Exit codes: 0 success / all checks pass, 1 failed checks, 2 usage or
// validation errors.
int run(const std::vector<std::string>& args);

int run_main(int argc, char** argv);

}  // namespace archmix
