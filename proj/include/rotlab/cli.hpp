#pragma once

#include <exception>
#include <ostream>
#include <string>
#include <vector>

namespace rotlab::cli {

enum ExitCode : int {
    kOk = 0,
    kInternal = 1,
    kConfig = 2,
    kResource = 3,
    kPrecision = 4,
    kAuditFailure = 5,
};

/// Runs one subcommand (cf, criterion, measure, simulate, build-theta).
/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int exit_code_for(const std::exception& e) noexcept;

}  // namespace rotlab::cli
