// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace fbmcmimo {

// Batch CLI entry point. Subcommands:
//   run <scenario> [--out DIR] [--plot] [--seed N] [--threads N]
//   sweep <scenario> --axis {M,L,snr_in_db,beta} --values v1,v2,... [same flags]
//   validate <scenario>
// Results go to files only; progress goes to stderr. Default output
// directory comes from $FBMCSIM_OUT, falling back to ./out.
// Exit codes: 0 success, 1 validation/usage error, 2 runtime error.
int cli_main(const std::vector<std::string>& args);
int cli_main(int argc, char** argv);

}  // namespace fbmcmimo
