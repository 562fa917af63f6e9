// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fbmcmimo/blind_tracking.hpp"
#include "fbmcmimo/channel.hpp"
#include "fbmcmimo/combining.hpp"

namespace fbmcmimo {

enum class ExperimentKind { self_equalization, blind_tracking };

// Complete description of one batch run. `seed` is the master seed; trial t
// uses derive_seed(seed, t), from which per-purpose streams are derived
// (0 = channel, 1 = data, 2 = noise, 3 = pilot plan, 4 = pilot noise).
struct Scenario {
    ExperimentKind experiment = ExperimentKind::self_equalization;
    FbmcConfig fbmc;
    PowerDelayProfile pdp = PowerDelayProfile::exponential(8, 4.0);
    int num_antennas = 128;  // M
    int num_users = 6;       // K, home cell
    double snr_in_db = 0.0;
    std::optional<ContaminationConfig> contamination;
    std::optional<BlindConfig> blind;
    int trials = 100;
    std::uint64_t seed = 1;

    void validate() const;
    bool operator==(const Scenario& other) const;
};

// Least-squares SINR estimator: per (user, subcarrier) fit the scalar g
// minimizing sum_n (z_n - g s_n)^2 over the steady-state instants, then
// SINR = g^2 E[s^2] / E[(z - g s)^2]. Scale-invariant by construction;
// capped at +/-200 dB. guard_symbols instants are dropped from both ends.
std::vector<double> measure_sinr_linear(const SymbolGrid& equalized,
                                        const SymbolGrid& transmitted, int guard_symbols);
std::vector<double> measure_sinr(const SymbolGrid& equalized, const SymbolGrid& transmitted,
                                 int guard_symbols);

struct SinrReport {
    Scenario scenario;
    double target_db = 0.0;
    // per_trial[t][combiner][l]: user-averaged per-subcarrier SINR in dB;
    // combiner 0 = MF, 1 = MMSE
    std::vector<std::array<std::vector<double>, 2>> per_trial;
    std::array<std::vector<double>, 2> ensemble_mean_db;
    std::array<std::vector<double>, 2> ensemble_var_db;

    static constexpr int kMf = 0;
    static constexpr int kMmse = 1;
};

struct TrackingReport {
    Scenario scenario;
    std::vector<TrackingTrace> per_seed;
    std::vector<double> median_trace_db;
    double median_mf_noisy_db = 0.0;
    double median_mf_clean_db = 0.0;
    double median_mmse_clean_db = 0.0;
};

// Fig. 1-style run: modulate -> channel -> analyze -> combine (MF and MMSE
// with perfect CSI) -> per-subcarrier SINR, aggregated over trials.
// max_threads = 0 picks the hardware concurrency; results do not depend on
// the thread count (reduction is ordered by trial index).
SinrReport run_self_equalization(const Scenario& scenario, int max_threads = 0);

// Fig. 2-style run: multicell shared pilots build a contaminated estimate,
// blind tracking runs on the data packet; one trace per seed plus the three
// per-realization baselines, aggregated as medians.
TrackingReport run_blind_tracking(const Scenario& scenario, int max_threads = 0);

enum class SweepAxis { num_antennas, num_subcarriers, snr_in_db, beta };

SweepAxis sweep_axis_from_string(const std::string& name);
std::string to_string(SweepAxis axis);

struct SweepPoint {
    double value = 0.0;
    std::variant<std::monostate, SinrReport, TrackingReport> report;
    std::string error;  // non-empty if this point failed

    bool failed() const { return !error.empty(); }
};

struct SweepReport {
    Scenario base;
    SweepAxis axis = SweepAxis::num_antennas;
    std::vector<SweepPoint> points;
};

// Independent runs along one axis; point i runs with master seed
// derive_seed(base.seed, 0x5eed + i). A failing point is recorded, not fatal.
SweepReport run_sweep(const Scenario& base, SweepAxis axis, const std::vector<double>& values,
                      int max_threads = 0);

}  // namespace fbmcmimo
