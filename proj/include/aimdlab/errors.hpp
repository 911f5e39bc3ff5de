//
// Copyright (c) 2026 The aimdlab Authors
//
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <stdexcept>

namespace aimdlab {

/// Invalid user-supplied configuration. The CLI maps this to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Runtime failure inside a model or simulation run, including internal
/// invariant violations (simulator bug detector). CLI exit code 2.
class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace aimdlab
