// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "fbmcmimo/channel.hpp"

namespace fbmcmimo {

// Multicell reuse layout: the home cell has large-scale gain 1, each of the
// num_cells-1 interfering cells reaches the base station with cross gain
// beta_j in [0, 1]. When shared_pilots is set every cell reuses the same
// pilot sequences, which is what contaminates the estimates.
struct ContaminationConfig {
    int num_cells = 7;
    std::vector<double> cross_gains;  // one per interfering cell
    bool shared_pilots = true;

    void validate() const;
};

// Uplink pilots: one full multicarrier symbol of known unit-power PAM per
// user, time-orthogonal inside a cell (user k owns pilot instant k).
struct PilotPlan {
    int num_users = 0;
    int num_subcarriers = 0;
    std::vector<double> symbols;  // [k][l], drawn from {-1,+1}

    double at(int k, int l) const {
        return symbols[static_cast<std::size_t>(k) * num_subcarriers + l];
    }

    static PilotPlan make(int num_users, int num_subcarriers, std::uint64_t seed);
};

struct ChannelEstimate {
    int num_antennas = 0;
    int num_users = 0;
    int num_subcarriers = 0;
    std::vector<std::complex<double>> gains;  // [m][k][l]
    double noise_var_estimate = 0.0;
    bool contaminated = false;
    std::vector<double> contamination_gains;  // cross gains baked into the estimate

    std::complex<double>& at(int m, int k, int l) {
        return gains[(static_cast<std::size_t>(m) * num_users + k) * num_subcarriers + l];
    }
    std::complex<double> at(int m, int k, int l) const {
        return gains[(static_cast<std::size_t>(m) * num_users + k) * num_subcarriers + l];
    }

    // Perfect-CSI estimate (genie): gains copied from the true response.
    static ChannelEstimate from_truth(const FrequencyResponse& truth);
};

// Analysis-domain pilot observations at the base station, one grid per
// antenna, instants = pilot slots (one per home-cell user). With shared
// pilots each interfering cell's user-k channel adds on top of the home
// user-k observation; estimation noise is CN(0, 10^(-snr/10)) per
// observation. Draw order: antenna-major, user slot, subcarrier.
std::vector<ComplexGrid> simulate_pilot_reception(
    const PilotPlan& plan, const FrequencyResponse& home,
    const std::vector<FrequencyResponse>& interferers, const ContaminationConfig& contamination,
    double snr_in_db, std::uint64_t seed);

// Per-subcarrier least squares against the known pilots. With time-orthogonal
// pilots this is a single division per (antenna, user, subcarrier), so a
// noise-free uncontaminated estimate equals the truth exactly.
ChannelEstimate estimate_channels(const PilotPlan& plan,
                                  const std::vector<ComplexGrid>& pilot_observations,
                                  const ContaminationConfig& contamination, double snr_in_db);

// Per-user per-subcarrier weight vectors; combining computes
// z(k,l,n) = sum_m w(k,l,m) * y_m(l,n)  (no conjugation at apply time).
struct CombinerWeights {
    int num_users = 0;
    int num_subcarriers = 0;
    int num_antennas = 0;
    std::vector<std::complex<double>> weights;  // [k][l][m]

    std::complex<double>& at(int k, int l, int m) {
        return weights[(static_cast<std::size_t>(k) * num_subcarriers + l) * num_antennas + m];
    }
    std::complex<double> at(int k, int l, int m) const {
        return weights[(static_cast<std::size_t>(k) * num_subcarriers + l) * num_antennas + m];
    }
};

// Matched filter / maximum ratio combining, normalized so the intended
// signal gain is exactly 1 per (user, subcarrier).
CombinerWeights mf_combiner(const ChannelEstimate& estimate);

// Multiuser MMSE: row k of (H^H H + noise_var I)^-1 H^H per subcarrier.
CombinerWeights mmse_combiner(const ChannelEstimate& estimate, double noise_var);

// Apply weights to per-antenna analysis grids and project onto the real
// axis (CMT demapping). Returns one grid per user.
std::vector<SymbolGrid> combine(const std::vector<ComplexGrid>& antenna_grids,
                                const CombinerWeights& weights);

// snr_in_db + 10 log10(M): the array-gain law for the expected output SINR.
double target_sinr_db(double snr_in_db, int num_antennas);

}  // namespace fbmcmimo
