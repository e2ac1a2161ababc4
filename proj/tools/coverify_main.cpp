// Copyright (C) 2026 coverify contributors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <string>
#include <vector>

#include "coverify/cli.hpp"

int main(int argc, char** argv) {
    return coverify::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
