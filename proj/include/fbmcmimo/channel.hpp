// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "fbmcmimo/filterbank.hpp"

namespace fbmcmimo {

// Multipath tap layout: integer sample delays, powers summing to one.
struct PowerDelayProfile {
    std::vector<int> tap_delays;
    std::vector<double> tap_powers;

    void validate() const;
    int max_delay() const { return tap_delays.empty() ? 0 : tap_delays.back(); }
    std::size_t num_taps() const { return tap_delays.size(); }

    // Single tap at delay zero.
    static PowerDelayProfile flat();
    // Taps at delays 0..num_taps-1 with powers proportional to
    // exp(-delay / decay), normalized to unit sum.
    static PowerDelayProfile exponential(int num_taps, double decay);
};

// One block-fading realization of the M x K frequency-selective uplink.
// Per-link taps are i.i.d. circularly symmetric Gaussian scaled by
// sqrt(tap_power * cell_gain); drawn antenna-major, then user, then tap.
struct ChannelSet {
    int num_antennas = 0;  // M
    int num_users = 0;     // K
    PowerDelayProfile pdp;
    std::vector<double> cell_gains;               // large-scale factor per user
    std::vector<std::complex<double>> taps;       // [m][k][tap]
    std::uint64_t rng_seed = 0;

    std::complex<double> tap(int m, int k, std::size_t t) const {
        return taps[(static_cast<std::size_t>(m) * num_users + k) * pdp.num_taps() + t];
    }
};

// L-point spectra of every link; gains[m][k][l].
struct FrequencyResponse {
    int num_antennas = 0;
    int num_users = 0;
    int num_subcarriers = 0;
    std::vector<std::complex<double>> gains;

    std::complex<double>& at(int m, int k, int l) {
        return gains[(static_cast<std::size_t>(m) * num_users + k) * num_subcarriers + l];
    }
    std::complex<double> at(int m, int k, int l) const {
        return gains[(static_cast<std::size_t>(m) * num_users + k) * num_subcarriers + l];
    }
};

ChannelSet draw_channels(const PowerDelayProfile& pdp, int num_antennas, int num_users,
                         const std::vector<double>& cell_gains, std::uint64_t seed);

FrequencyResponse frequency_response(const ChannelSet& channels, int num_subcarriers);

// Per-antenna complex noise variance for a given per-antenna input SNR.
// Reference signal power is the steady-state received power of one
// unit-cell-gain user, which is 2 in this normalization (unit-power PAM at
// two instants per multicarrier symbol through a unit-energy pulse).
double noise_variance_for(double snr_in_db);

// y_m = sum_k h_{m,k} * x_k + noise, truncated to the input frame length.
// Noise draws are antenna-major, sample-major, real part first; pass
// snr_in_db = +infinity for a noise-free channel.
std::vector<TimeSignal> apply_channel(const std::vector<TimeSignal>& user_signals,
                                      const ChannelSet& channels, double snr_in_db,
                                      std::uint64_t seed);

}  // namespace fbmcmimo
