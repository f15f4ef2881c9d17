// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "solomon/cli/cli.hpp"

int main(int argc, char** argv) { return solomon::cli::main_entry(argc, argv, std::cin, std::cout, std::cerr); }
