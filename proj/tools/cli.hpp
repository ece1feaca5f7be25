// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#pragma once

#include <string>
#include <vector>

namespace turingkit::cli {

/// Runs the command line. Returns the process exit status: 0 on success,
/// 1 on any error, 2 on usage errors.
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

}  // namespace turingkit::cli
