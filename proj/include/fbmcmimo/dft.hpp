// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <vector>

namespace fbmcmimo {

// Radix-2 DFT for the polyphase banks and channel spectra. Sizes here are
// small powers of two (L <= 1024), so a plain iterative Cooley-Tukey with
// precomputed twiddles is plenty and keeps results bit-reproducible with no
// plan state shared across threads.
class Dft {
public:
    explicit Dft(int size);

    int size() const { return size_; }

    // In-place, X[k] = sum_n x[n] exp(-j 2 pi n k / N).
    void forward(std::complex<double>* data) const;

    // In-place, x[m] = sum_k X[k] exp(+j 2 pi k m / N). No 1/N factor.
    void inverse_unnormalized(std::complex<double>* data) const;

private:
    void transform(std::complex<double>* data, bool inverse) const;

    int size_;
    int log2_size_;
    std::vector<std::complex<double>> twiddle_;   // exp(-j 2 pi k / N), k < N/2
    std::vector<int> bit_reversed_;
};

bool is_power_of_two(int value);

}  // namespace fbmcmimo
