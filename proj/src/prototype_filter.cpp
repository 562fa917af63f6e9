// SPDX-License-Identifier: Apache-2.0
#include "fbmcmimo/prototype_filter.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "fbmcmimo/dft.hpp"
#include "fbmcmimo/errors.hpp"

namespace fbmcmimo {

namespace {

// Published frequency-sampling values for the free coefficients; the
// dependent ones are recomputed from the pairwise power constraint so that
// H_k^2 + H_{K-k}^2 = 1 holds to machine precision.
std::vector<double> freq_samples_for(int overlap_factor) {
    switch (overlap_factor) {
        case 3: {
            const double h1 = 0.91143783;
            return {1.0, h1, std::sqrt(1.0 - h1 * h1)};
        }
        case 4: {
            const double h1 = 0.97195983;
            return {1.0, h1, std::sqrt(0.5), std::sqrt(1.0 - h1 * h1)};
        }
        case 6: {
            const double h1 = 0.99722723;
            const double h2 = 0.94136732;
            return {1.0,
                    h1,
                    h2,
                    std::sqrt(0.5),
                    std::sqrt(1.0 - h2 * h2),
                    std::sqrt(1.0 - h1 * h1)};
        }
        default:
            throw ConfigError("overlap_factor must be one of {3, 4, 6}, got " +
                              std::to_string(overlap_factor));
    }
}

}  // namespace

PrototypeFilter design_prototype(int num_subcarriers, int overlap_factor) {
    if (!is_power_of_two(num_subcarriers)) {
        throw ConfigError("num_subcarriers must be a power of two, got " +
                          std::to_string(num_subcarriers));
    }
    const std::vector<double> h = freq_samples_for(overlap_factor);

    const int period = overlap_factor * num_subcarriers;
    std::vector<double> taps(period + 1);
    for (int n = 0; n <= period; ++n) {
        double v = h[0];
        for (int k = 1; k < overlap_factor; ++k) {
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            v += 2.0 * sign * h[k] *
                 std::cos(2.0 * std::numbers::pi * k * n / static_cast<double>(period));
        }
        taps[n] = v;
    }
    // symmetric by construction (cos is periodic in n -> period - n); enforce
    // exactly so the linear-phase invariant is bitwise
    for (int n = 0; n < (period + 1) / 2; ++n) {
        const double avg = 0.5 * (taps[n] + taps[period - n]);
        taps[n] = avg;
        taps[period - n] = avg;
    }
    double energy = 0.0;
    for (double t : taps) energy += t * t;
    const double scale = 1.0 / std::sqrt(energy);
    for (double& t : taps) t *= scale;

    PrototypeFilter filter;
    filter.taps = std::move(taps);
    filter.freq_samples = h;
    filter.overlap_factor = overlap_factor;
    filter.num_subcarriers = num_subcarriers;
    return filter;
}

void export_taps(const PrototypeFilter& filter, std::ostream& out) {
    char buf[64];
    for (double t : filter.taps) {
        std::snprintf(buf, sizeof(buf), "%.17g\n", t);
        out << buf;
    }
}

}  // namespace fbmcmimo
