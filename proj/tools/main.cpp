// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#include "cli.hpp"

int main(int argc, char** argv) { return turingkit::cli::run(argc, argv); }
