// SPDX-License-Identifier: Apache-2.0
#include "hqmc/cli.hpp"

int main(int argc, char** argv) { return hqmc::cli_main(argc, argv); }
