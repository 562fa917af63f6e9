// SPDX-License-Identifier: Apache-2.0
#include "fbmcmimo/filterbank.hpp"

#include <string>

#include "fbmcmimo/dft.hpp"
#include "fbmcmimo/errors.hpp"
#include "fbmcmimo/rng.hpp"

namespace fbmcmimo {

namespace {

constexpr std::complex<double> kQuarterTurns[4] = {
    {1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};

// theta(l,n) * exp(-j 2 pi l D / L) with D = overlap*L/2. The second factor
// is exactly (-1)^(l*overlap).
inline std::complex<double> synthesis_phase(int l, int n, int overlap) {
    std::complex<double> th = kQuarterTurns[(l + n) & 3];
    if ((l * overlap) & 1) th = -th;
    return th;
}

void check_filter_matches(const FbmcConfig& cfg, const PrototypeFilter& filter) {
    if (filter.num_subcarriers != cfg.num_subcarriers ||
        filter.overlap_factor != cfg.overlap_factor) {
        throw ShapeError("prototype filter designed for L=" +
                         std::to_string(filter.num_subcarriers) + ", overlap=" +
                         std::to_string(filter.overlap_factor) + " but config has L=" +
                         std::to_string(cfg.num_subcarriers) + ", overlap=" +
                         std::to_string(cfg.overlap_factor));
    }
}

}  // namespace

void FbmcConfig::validate() const {
    if (!is_power_of_two(num_subcarriers)) {
        throw ConfigError("num_subcarriers must be a power of two, got " +
                          std::to_string(num_subcarriers));
    }
    if (overlap_factor != 3 && overlap_factor != 4 && overlap_factor != 6) {
        throw ConfigError("overlap_factor must be one of {3, 4, 6}, got " +
                          std::to_string(overlap_factor));
    }
    if (num_symbols < 2 * overlap_factor) {
        throw ConfigError("num_symbols must be >= 2*overlap_factor (" +
                          std::to_string(2 * overlap_factor) + "), got " +
                          std::to_string(num_symbols));
    }
    if (pam_order != 2 && pam_order != 4) {
        throw ConfigError("pam_order must be 2 or 4, got " + std::to_string(pam_order));
    }
}

std::size_t synth_signal_length(const FbmcConfig& cfg) {
    const std::size_t half = static_cast<std::size_t>(cfg.num_subcarriers) / 2;
    const std::size_t pulse_len =
        static_cast<std::size_t>(cfg.overlap_factor) * cfg.num_subcarriers + 1;
    return static_cast<std::size_t>(cfg.num_symbols - 1) * half + pulse_len;
}

SymbolGrid random_pam_grid(const FbmcConfig& cfg, Rng& rng, int user_id) {
    cfg.validate();
    SymbolGrid grid(cfg.num_subcarriers, cfg.num_symbols);
    grid.user_id = user_id;
    for (double& v : grid.values) v = rng.pam_symbol(cfg.pam_order);
    return grid;
}

TimeSignal synthesize(const SymbolGrid& grid, const FbmcConfig& cfg,
                      const PrototypeFilter& filter) {
    cfg.validate();
    check_filter_matches(cfg, filter);
    if (grid.num_subcarriers != cfg.num_subcarriers || grid.num_symbols != cfg.num_symbols) {
        throw ShapeError("symbol grid is " + std::to_string(grid.num_subcarriers) + "x" +
                         std::to_string(grid.num_symbols) + ", config expects " +
                         std::to_string(cfg.num_subcarriers) + "x" +
                         std::to_string(cfg.num_symbols));
    }

    const int L = cfg.num_subcarriers;
    const int half = L / 2;
    const int pulse_len = cfg.overlap_factor * L + 1;
    const Dft dft(L);

    TimeSignal signal;
    signal.samples.assign(synth_signal_length(cfg), {0.0, 0.0});

    std::vector<std::complex<double>> spectrum(L);
    for (int n = 0; n < cfg.num_symbols; ++n) {
        for (int l = 0; l < L; ++l) {
            spectrum[l] = grid.at(l, n) * synthesis_phase(l, n, cfg.overlap_factor);
        }
        dft.inverse_unnormalized(spectrum.data());
        const int offset = n * half;
        // offset mod L is 0 or L/2, so the modular index walks the IDFT
        // buffer starting at that point
        int idx = offset % L;
        for (int tau = 0; tau < pulse_len; ++tau) {
            signal.samples[offset + tau] += filter.taps[tau] * spectrum[idx];
            if (++idx == L) idx = 0;
        }
    }
    return signal;
}

ComplexGrid analyze_complex(const TimeSignal& signal, const FbmcConfig& cfg,
                            const PrototypeFilter& filter) {
    cfg.validate();
    check_filter_matches(cfg, filter);
    const std::size_t expected = synth_signal_length(cfg);
    if (signal.samples.size() != expected) {
        throw ShapeError("signal has " + std::to_string(signal.samples.size()) +
                         " samples, configured frame is " + std::to_string(expected));
    }

    const int L = cfg.num_subcarriers;
    const int half = L / 2;
    const int pulse_len = cfg.overlap_factor * L + 1;
    const Dft dft(L);

    ComplexGrid out(L, cfg.num_symbols);
    std::vector<std::complex<double>> folded(L);
    for (int n = 0; n < cfg.num_symbols; ++n) {
        std::fill(folded.begin(), folded.end(), std::complex<double>{0.0, 0.0});
        const int offset = n * half;
        int idx = offset % L;
        for (int tau = 0; tau < pulse_len; ++tau) {
            folded[idx] += signal.samples[offset + tau] * filter.taps[tau];
            if (++idx == L) idx = 0;
        }
        dft.forward(folded.data());
        for (int l = 0; l < L; ++l) {
            out.at(l, n) = std::conj(synthesis_phase(l, n, cfg.overlap_factor)) * folded[l];
        }
        // conj(theta * (-1)^(l*overlap)) carries both the theta removal and
        // the +j2pi l D / L reference shift (the sign factor is real)
    }
    return out;
}

SymbolGrid analyze(const TimeSignal& signal, const FbmcConfig& cfg,
                   const PrototypeFilter& filter) {
    const ComplexGrid y = analyze_complex(signal, cfg, filter);
    SymbolGrid grid(y.num_subcarriers, y.num_symbols);
    for (std::size_t i = 0; i < y.values.size(); ++i) {
        grid.values[i] = y.values[i].real();
    }
    return grid;
}

std::vector<double> intrinsic_interference_profile(const FbmcConfig& cfg,
                                                   const PrototypeFilter& filter) {
    cfg.validate();
    check_filter_matches(cfg, filter);
    const int L = cfg.num_subcarriers;
    const int N = cfg.num_symbols;
    std::vector<double> profile(static_cast<std::size_t>(L) * N, 0.0);
    SymbolGrid sounding(L, N);
    for (int l = 0; l < L; ++l) {
        for (int n = 0; n < N; ++n) {
            sounding.at(l, n) = 1.0;
            const ComplexGrid response = analyze_complex(synthesize(sounding, cfg, filter), cfg, filter);
            sounding.at(l, n) = 0.0;
            double residual = 0.0;
            for (int lp = 0; lp < L; ++lp) {
                for (int np = 0; np < N; ++np) {
                    std::complex<double> v = response.at(lp, np);
                    if (lp == l && np == n) v -= 1.0;
                    residual += std::norm(v);
                }
            }
            profile[static_cast<std::size_t>(l) * N + n] = residual;
        }
    }
    return profile;
}

}  // namespace fbmcmimo
