// SPDX-License-Identifier: Apache-2.0
#include "fbmcmimo/dft.hpp"

#include <cmath>
#include <numbers>

#include "fbmcmimo/errors.hpp"

namespace fbmcmimo {

bool is_power_of_two(int value) {
    return value > 0 && (value & (value - 1)) == 0;
}

Dft::Dft(int size) : size_(size) {
    if (!is_power_of_two(size)) {
        throw ConfigError("DFT size must be a power of two, got " + std::to_string(size));
    }
    log2_size_ = 0;
    while ((1 << log2_size_) < size_) ++log2_size_;

    twiddle_.resize(size_ / 2 > 0 ? size_ / 2 : 1);
    for (int k = 0; k < size_ / 2; ++k) {
        const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / size_;
        twiddle_[k] = {std::cos(angle), std::sin(angle)};
    }

    bit_reversed_.resize(size_);
    for (int i = 0; i < size_; ++i) {
        int rev = 0;
        for (int b = 0; b < log2_size_; ++b) {
            rev = (rev << 1) | ((i >> b) & 1);
        }
        bit_reversed_[i] = rev;
    }
}

void Dft::transform(std::complex<double>* data, bool inverse) const {
    for (int i = 0; i < size_; ++i) {
        const int j = bit_reversed_[i];
        if (j > i) std::swap(data[i], data[j]);
    }
    for (int len = 2; len <= size_; len <<= 1) {
        const int half = len / 2;
        const int stride = size_ / len;
        for (int start = 0; start < size_; start += len) {
            for (int k = 0; k < half; ++k) {
                std::complex<double> w = twiddle_[k * stride];
                if (inverse) w = std::conj(w);
                const std::complex<double> u = data[start + k];
                const std::complex<double> t = w * data[start + k + half];
                data[start + k] = u + t;
                data[start + k + half] = u - t;
            }
        }
    }
}

void Dft::forward(std::complex<double>* data) const {
    transform(data, false);
}

void Dft::inverse_unnormalized(std::complex<double>* data) const {
    transform(data, true);
}

}  // namespace fbmcmimo
