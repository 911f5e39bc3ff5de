//
// Copyright (c) 2026 The aimdlab Authors
//
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <string>
#include <vector>

namespace aimdlab {

/// Command-line front end. Returns the process exit code:
/// 0 success, 1 configuration error, 2 runtime/simulation error.
int cli_main(std::vector<std::string> args);
int cli_main(int argc, char** argv);

}  // namespace aimdlab
