// SPDX-License-Identifier: Apache-2.0
// Command-line front end: randwork {run,validate,list,report}.

#include "randwork/cli.hpp"

int main(int argc, char **argv) { return randwork::cli_main(argc, argv); }
