// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "cloze/cli/commands.hpp"

int main(int argc, char** argv) {
  return clozeread::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
