// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "fbmcmimo/combining.hpp"

namespace fbmcmimo {

// Godard-style dispersion adaptation of the combiner weights. The cost per
// (user, subcarrier) slot is  J(w) = mean_n (z_n^2 - R)^2  with
// z_n = Re(sum_m w_m y_mn), i.e. the real CMT output; its gradient with
// respect to (Re w_m, Im w_m), packed as a complex number, is
//   g_m = (4/B) sum_n (z_n^2 - R) z_n conj(y_mn).
// One update processes a block of instants:  w <- w - mu / P_z * g  where
// P_z is the block output power (mean z_n^2). Blind criteria are sign-blind:
// -w is as good as w, which the scalar-fit SINR measurement absorbs.
struct BlindConfig {
    double step_size = 1e-3;          // mu
    double dispersion_constant = 0.0; // R; 0 = derive from the PAM alphabet
    int iterations = 100;             // recorded trace points (entry 0 = init)
    int block_size = 32;              // instants per update; 1 = sample-by-sample
    enum class Init { mf_contaminated, custom } init = Init::mf_contaminated;

    void validate() const;
};

// E[a^4] / E[a^2] for the unit-power PAM alphabet (1.0 for PAM-2).
double pam_dispersion_constant(int pam_order);

double godard_cost(std::span<const double> outputs, double dispersion_constant);

// Strided view over one subcarrier's antenna-domain outputs: sample (m, n)
// lives at base[m * stride + n].
struct BlockView {
    const std::complex<double>* base = nullptr;
    int num_antennas = 0;
    int num_instants = 0;
    int stride = 0;

    std::complex<double> at(int m, int n) const {
        return base[static_cast<std::size_t>(m) * stride + n];
    }
};

std::vector<std::complex<double>> godard_gradient(std::span<const std::complex<double>> weights,
                                                  const BlockView& block,
                                                  double dispersion_constant);

// One normalized gradient step on a block. Throws DivergenceError once the
// weight norm exceeds 1e6 times initial_norm.
void blind_update(std::vector<std::complex<double>>& weights, const BlockView& block,
                  const BlindConfig& cfg, double dispersion_constant, double initial_norm);

// Everything track() needs from one simulated coherence block.
struct TrackingRealization {
    FbmcConfig fbmc;
    std::vector<ComplexGrid> antenna_grids;       // analysis outputs, one per antenna
    std::vector<SymbolGrid> home_tx;              // transmitted home-cell grids
    ChannelEstimate contaminated;                 // pilot-based (corrupted) estimate
    FrequencyResponse home_truth;                 // M x K x L
    FrequencyResponse stacked_truth;              // home plus scaled interferer columns
    double noise_var = 0.0;                       // analysis-domain noise variance
    std::optional<CombinerWeights> custom_initial_weights;
};

struct TrackingTrace {
    std::vector<double> sinr_db_per_iteration;  // entry 0 is the starting state
    double mf_noisy_db = 0.0;
    double mf_clean_db = 0.0;
    double mmse_clean_db = 0.0;
};

// Initializes from the contaminated MF weights, sweeps the data packet once
// per iteration (blockwise, steady-state instants only), and records the
// subcarrier-averaged SINR before each sweep. Baselines are evaluated on the
// identical realization; the clean-MMSE baseline uses the full multicell
// channel matrix (it is the genie bound the blind tracker works toward).
TrackingTrace track(const TrackingRealization& realization, const BlindConfig& cfg);

}  // namespace fbmcmimo
