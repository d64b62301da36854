// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return wtflow::cli::run(argc, argv, std::cout, std::cerr); }
