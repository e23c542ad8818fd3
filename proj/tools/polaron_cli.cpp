// Copyright 2026 The polaron-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "polaron/cli.hpp"

int main(int argc, char** argv) { return polaron::run_cli(argc, argv, std::cerr); }
