// SPDX-License-Identifier: Apache-2.0
#include "fbmcmimo/cli.hpp"

int main(int argc, char** argv) {
    return fbmcmimo::cli_main(argc, argv);
}
