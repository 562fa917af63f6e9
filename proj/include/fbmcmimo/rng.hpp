// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include "fbmcmimo/errors.hpp"

namespace fbmcmimo {

// Stream derivation: every independent random stream in a run is seeded as
// derive_seed(master, stream_id) where stream_id encodes (trial, purpose).
// Uses one splitmix64 step so nearby master seeds / stream ids decorrelate.
inline std::uint64_t splitmix64_step(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64_step(splitmix64_step(master) ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
}

// Seeded generator wrapping mt19937_64. Draw order is part of the
// reproducibility contract: callers document the order in which they consume
// values.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double standard_normal() { return normal_(engine_); }

    // CN(0, variance): independent real/imag parts, real drawn first.
    std::complex<double> circular_gaussian(double variance) {
        const double s = std::sqrt(variance / 2.0);
        const double re = s * standard_normal();
        const double im = s * standard_normal();
        return {re, im};
    }

    // Unit-average-power real PAM symbol. Order 2: {-1,+1}. Order 4:
    // {-3,-1,+1,+3}/sqrt(5).
    double pam_symbol(int pam_order) {
        if (pam_order == 2) {
            return pick_(engine_) % 2 == 0 ? -1.0 : 1.0;
        }
        if (pam_order == 4) {
            static constexpr double kScale = 0.44721359549995793;  // 1/sqrt(5)
            const int idx = static_cast<int>(pick_(engine_) % 4);
            return (2 * idx - 3) * kScale;
        }
        throw ConfigError("pam_order must be 2 or 4");
    }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_int_distribution<std::uint64_t> pick_{0, 0xffffffffULL};
};

}  // namespace fbmcmimo
