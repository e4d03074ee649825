#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tiersim {

// Exit statuses of the command-line driver.
enum exit_status : int {
    exit_ok = 0,
    exit_failure = 1,  // validation, syntax or domain failure
    exit_io = 2,
};

// Runs the `tiersim` command line. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tiersim
