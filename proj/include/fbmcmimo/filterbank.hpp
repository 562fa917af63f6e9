// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "fbmcmimo/prototype_filter.hpp"

namespace fbmcmimo {

// CMT-style FBMC modem: real PAM symbols, one per subcarrier per half-symbol
// instant, vestigial-sideband subcarriers realized through OQAM-type
// staggering.
//
// Convention (fixed for all framing math in this repo):
//   - Prototype p has length Lp = overlap*L + 1, unit energy, linear phase.
//   - Symbol instants are spaced L/2 samples apart (half a multicarrier
//     symbol interval), which is the "half-symbol staggering".
//   - Slot (l, n) transmits   a(l,n) * theta(l,n) * p[t - n*L/2]
//                             * exp(+j 2 pi l (t - D) / L)
//     with theta(l,n) = j^((l+n) mod 4) and D = overlap*L/2 (the filter
//     center, so the phase reference sits at the pulse peak). Because D is a
//     multiple of L/2, exp(-j 2 pi l D / L) = (-1)^(l*overlap) exactly.
//   - The analysis bank is the matched filter: correlate with the same pulse
//     and carrier, undo theta, then take the real part. Adjacent-slot
//     leakage lands on the imaginary axis and is discarded; the designed
//     prototype keeps the residual real leakage below -50 dB.
//   - Signal length is (N-1)*L/2 + overlap*L + 1 samples; tails are kept.
struct FbmcConfig {
    int num_subcarriers = 64;  // L, power of two
    int overlap_factor = 4;    // {3, 4, 6}
    int num_symbols = 64;      // N, >= 2*overlap_factor
    int pam_order = 2;         // {2, 4}

    void validate() const;
};

// L x N real PAM grid, subcarrier-major storage.
struct SymbolGrid {
    int num_subcarriers = 0;
    int num_symbols = 0;
    int user_id = 0;
    std::vector<double> values;  // values[l * num_symbols + n]

    SymbolGrid() = default;
    SymbolGrid(int l, int n)
        : num_subcarriers(l), num_symbols(n),
          values(static_cast<std::size_t>(l) * n, 0.0) {}

    double& at(int l, int n) { return values[static_cast<std::size_t>(l) * num_symbols + n]; }
    double at(int l, int n) const { return values[static_cast<std::size_t>(l) * num_symbols + n]; }
};

// Complex analysis-domain grid (pre real-part projection), same layout.
struct ComplexGrid {
    int num_subcarriers = 0;
    int num_symbols = 0;
    std::vector<std::complex<double>> values;

    ComplexGrid() = default;
    ComplexGrid(int l, int n)
        : num_subcarriers(l), num_symbols(n),
          values(static_cast<std::size_t>(l) * n, {0.0, 0.0}) {}

    std::complex<double>& at(int l, int n) {
        return values[static_cast<std::size_t>(l) * num_symbols + n];
    }
    std::complex<double> at(int l, int n) const {
        return values[static_cast<std::size_t>(l) * num_symbols + n];
    }
};

struct TimeSignal {
    std::vector<std::complex<double>> samples;
};

// Deterministic framing: number of baseband samples synthesize() emits.
std::size_t synth_signal_length(const FbmcConfig& cfg);

class Rng;
// Unit-average-power random PAM grid; symbols drawn subcarrier-major.
SymbolGrid random_pam_grid(const FbmcConfig& cfg, Rng& rng, int user_id = 0);

// Polyphase synthesis bank (IDFT + pulse overlap-add per instant).
TimeSignal synthesize(const SymbolGrid& grid, const FbmcConfig& cfg,
                      const PrototypeFilter& filter);

// Matched analysis bank, complex output (before the CMT real projection).
ComplexGrid analyze_complex(const TimeSignal& signal, const FbmcConfig& cfg,
                            const PrototypeFilter& filter);

// Full demodulation: analysis bank plus real-part projection.
SymbolGrid analyze(const TimeSignal& signal, const FbmcConfig& cfg,
                   const PrototypeFilter& filter);

// Diagnostic: sound every slot through a back-to-back modem and report, per
// slot, the total residual power seen when the real-part projection is
// skipped (the interference the CMT structure parks on the imaginary axis).
std::vector<double> intrinsic_interference_profile(const FbmcConfig& cfg,
                                                   const PrototypeFilter& filter);

}  // namespace fbmcmimo
