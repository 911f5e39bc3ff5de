//
// Copyright (c) 2026 The aimdlab Authors
//
// SPDX-License-Identifier: Apache-2.0
//

#include "aimdlab/cli.hpp"

int main(int argc, char** argv) { return aimdlab::cli_main(argc, argv); }
