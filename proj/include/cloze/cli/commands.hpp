// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef CLOZE_CLI_COMMANDS_HPP_
#define CLOZE_CLI_COMMANDS_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace clozeread::cli {

/// Runs one `cloze` invocation. `args` excludes the program name. Human
/// readable output goes to `out`, diagnostics to `err`. Returns the process
/// exit status: 0 on success, 1 on a failed command, 2 on a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace clozeread::cli

#endif  // CLOZE_CLI_COMMANDS_HPP_
