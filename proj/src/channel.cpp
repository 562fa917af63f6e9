// SPDX-License-Identifier: Apache-2.0
#include "fbmcmimo/channel.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "fbmcmimo/dft.hpp"
#include "fbmcmimo/errors.hpp"
#include "fbmcmimo/rng.hpp"

namespace fbmcmimo {

void PowerDelayProfile::validate() const {
    if (tap_delays.empty() || tap_powers.size() != tap_delays.size()) {
        throw ConfigError("power delay profile needs matching, non-empty delay and power lists");
    }
    if (tap_delays.front() != 0) {
        throw ConfigError("power delay profile must start at delay 0");
    }
    for (std::size_t i = 1; i < tap_delays.size(); ++i) {
        if (tap_delays[i] <= tap_delays[i - 1]) {
            throw ConfigError("power delay profile delays must be strictly increasing");
        }
    }
    double sum = 0.0;
    for (double p : tap_powers) {
        if (p < 0.0) throw ConfigError("power delay profile powers must be nonnegative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ConfigError("power delay profile powers must sum to 1, got " + std::to_string(sum));
    }
}

PowerDelayProfile PowerDelayProfile::flat() {
    return {{0}, {1.0}};
}

PowerDelayProfile PowerDelayProfile::exponential(int num_taps, double decay) {
    if (num_taps < 1) throw ConfigError("exponential PDP needs at least one tap");
    if (decay <= 0.0) throw ConfigError("exponential PDP decay must be positive");
    PowerDelayProfile pdp;
    double sum = 0.0;
    for (int d = 0; d < num_taps; ++d) {
        pdp.tap_delays.push_back(d);
        const double p = std::exp(-d / decay);
        pdp.tap_powers.push_back(p);
        sum += p;
    }
    for (double& p : pdp.tap_powers) p /= sum;
    return pdp;
}

ChannelSet draw_channels(const PowerDelayProfile& pdp, int num_antennas, int num_users,
                         const std::vector<double>& cell_gains, std::uint64_t seed) {
    pdp.validate();
    if (num_antennas < 1 || num_users < 1) {
        throw ConfigError("channel set needs num_antennas >= 1 and num_users >= 1");
    }
    if (cell_gains.size() != static_cast<std::size_t>(num_users)) {
        throw ConfigError("cell_gains must have one entry per user");
    }
    for (double g : cell_gains) {
        if (g < 0.0) throw ConfigError("cell gains must be nonnegative");
    }

    ChannelSet ch;
    ch.num_antennas = num_antennas;
    ch.num_users = num_users;
    ch.pdp = pdp;
    ch.cell_gains = cell_gains;
    ch.rng_seed = seed;
    ch.taps.resize(static_cast<std::size_t>(num_antennas) * num_users * pdp.num_taps());

    Rng rng(seed);
    std::size_t idx = 0;
    for (int m = 0; m < num_antennas; ++m) {
        for (int k = 0; k < num_users; ++k) {
            for (std::size_t t = 0; t < pdp.num_taps(); ++t) {
                ch.taps[idx++] = rng.circular_gaussian(pdp.tap_powers[t] * cell_gains[k]);
            }
        }
    }
    return ch;
}

FrequencyResponse frequency_response(const ChannelSet& channels, int num_subcarriers) {
    if (!is_power_of_two(num_subcarriers)) {
        throw ConfigError("num_subcarriers must be a power of two, got " +
                          std::to_string(num_subcarriers));
    }
    if (channels.pdp.max_delay() >= num_subcarriers) {
        throw ConfigError("channel spans " + std::to_string(channels.pdp.max_delay() + 1) +
                          " samples, longer than the " + std::to_string(num_subcarriers) +
                          "-point spectrum");
    }

    const Dft dft(num_subcarriers);
    FrequencyResponse fr;
    fr.num_antennas = channels.num_antennas;
    fr.num_users = channels.num_users;
    fr.num_subcarriers = num_subcarriers;
    fr.gains.resize(static_cast<std::size_t>(channels.num_antennas) * channels.num_users *
                    num_subcarriers);

    std::vector<std::complex<double>> buf(num_subcarriers);
    for (int m = 0; m < channels.num_antennas; ++m) {
        for (int k = 0; k < channels.num_users; ++k) {
            std::fill(buf.begin(), buf.end(), std::complex<double>{0.0, 0.0});
            for (std::size_t t = 0; t < channels.pdp.num_taps(); ++t) {
                buf[channels.pdp.tap_delays[t]] = channels.tap(m, k, t);
            }
            dft.forward(buf.data());
            for (int l = 0; l < num_subcarriers; ++l) {
                fr.at(m, k, l) = buf[l];
            }
        }
    }
    return fr;
}

double noise_variance_for(double snr_in_db) {
    if (std::isinf(snr_in_db) && snr_in_db > 0) return 0.0;
    return 2.0 / std::pow(10.0, snr_in_db / 10.0);
}

std::vector<TimeSignal> apply_channel(const std::vector<TimeSignal>& user_signals,
                                      const ChannelSet& channels, double snr_in_db,
                                      std::uint64_t seed) {
    if (user_signals.size() != static_cast<std::size_t>(channels.num_users)) {
        throw ShapeError("got " + std::to_string(user_signals.size()) + " user signals for a " +
                         std::to_string(channels.num_users) + "-user channel set");
    }
    const std::size_t len = user_signals.front().samples.size();
    for (const TimeSignal& s : user_signals) {
        if (s.samples.size() != len) {
            throw ShapeError("all user signals must have the same length");
        }
    }

    const double sigma2 = noise_variance_for(snr_in_db);
    Rng rng(seed);

    std::vector<TimeSignal> out(static_cast<std::size_t>(channels.num_antennas));
    for (int m = 0; m < channels.num_antennas; ++m) {
        TimeSignal& y = out[m];
        y.samples.assign(len, {0.0, 0.0});
        for (int k = 0; k < channels.num_users; ++k) {
            const std::vector<std::complex<double>>& x = user_signals[k].samples;
            for (std::size_t t = 0; t < channels.pdp.num_taps(); ++t) {
                const int d = channels.pdp.tap_delays[t];
                const std::complex<double> g = channels.tap(m, k, t);
                for (std::size_t i = d; i < len; ++i) {
                    y.samples[i] += g * x[i - d];
                }
            }
        }
        if (sigma2 > 0.0) {
            for (std::size_t i = 0; i < len; ++i) {
                y.samples[i] += rng.circular_gaussian(sigma2);
            }
        }
    }
    return out;
}

}  // namespace fbmcmimo
