#pragma once

#include <string>

#include "config.hpp"

namespace stclf::cli {

// Each command returns the process exit code (ExitCode values); configuration
// and hypothesis errors are thrown and mapped by the caller.
int cmd_run(const Job& job);
int cmd_field(const Job& job);
int cmd_verify(const Job& job);
int cmd_reproduce(const std::string& out_dir);
int cmd_report(const std::string& out_dir);

}  // namespace stclf::cli
