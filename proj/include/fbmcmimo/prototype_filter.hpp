// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <vector>

namespace fbmcmimo {

// Linear-phase near-perfect-reconstruction prototype pulse shared by the
// synthesis and analysis banks. Designed by frequency sampling: the filter is
// the inverse transform of a handful of frequency-domain samples H_k, and the
// near-PR property comes from the pairwise power constraint
// H_k^2 + H_{overlap-k}^2 = 1 (with H_{overlap/2} = sqrt(1/2) for even
// overlap factors).
struct PrototypeFilter {
    std::vector<double> taps;          // length overlap_factor*L + 1, unit energy
    std::vector<double> freq_samples;  // H_0 .. H_{overlap_factor-1}
    int overlap_factor = 0;
    int num_subcarriers = 0;
};

// Frequency-sampling design. L must be a power of two; overlap_factor must be
// one of {3, 4, 6}. Deterministic: identical inputs give identical taps.
PrototypeFilter design_prototype(int num_subcarriers, int overlap_factor);

// One tap per line, 17 significant digits, for external cross-checks.
void export_taps(const PrototypeFilter& filter, std::ostream& out);

}  // namespace fbmcmimo
