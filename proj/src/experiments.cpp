// SPDX-License-Identifier: Apache-2.0
#include "fbmcmimo/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

#include "fbmcmimo/errors.hpp"
#include "fbmcmimo/rng.hpp"

namespace fbmcmimo {

namespace {

constexpr double kSinrCapDb = 200.0;

// Run fn(0..count-1) on up to max_threads workers. Tasks write to disjoint
// slots, so the schedule cannot affect results; the first exception wins.
void run_parallel(int count, int max_threads, const std::function<void(int)>& fn) {
    int threads = max_threads > 0 ? max_threads
                                  : static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

double median_of(std::vector<double> v) {
    const std::size_t n = v.size();
    std::sort(v.begin(), v.end());
    if (n == 0) return 0.0;
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

void Scenario::validate() const {
    fbmc.validate();
    pdp.validate();
    if (num_antennas < 1) throw ConfigError("num_antennas must be >= 1");
    if (num_users < 1) throw ConfigError("num_users must be >= 1");
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (pdp.max_delay() >= fbmc.num_subcarriers) {
        throw ConfigError("channel delay spread must be shorter than one subcarrier period");
    }
    if (contamination) contamination->validate();
    if (blind) blind->validate();
    if (experiment == ExperimentKind::blind_tracking) {
        if (!contamination) {
            throw ConfigError("blind_tracking experiment requires a contamination block");
        }
        if (!blind) throw ConfigError("blind_tracking experiment requires a blind block");
    }
}

bool Scenario::operator==(const Scenario& other) const {
    auto blind_eq = [](const std::optional<BlindConfig>& a, const std::optional<BlindConfig>& b) {
        if (a.has_value() != b.has_value()) return false;
        if (!a) return true;
        return a->step_size == b->step_size && a->dispersion_constant == b->dispersion_constant &&
               a->iterations == b->iterations && a->block_size == b->block_size &&
               a->init == b->init;
    };
    auto cont_eq = [](const std::optional<ContaminationConfig>& a,
                      const std::optional<ContaminationConfig>& b) {
        if (a.has_value() != b.has_value()) return false;
        if (!a) return true;
        return a->num_cells == b->num_cells && a->cross_gains == b->cross_gains &&
               a->shared_pilots == b->shared_pilots;
    };
    return experiment == other.experiment && fbmc.num_subcarriers == other.fbmc.num_subcarriers &&
           fbmc.overlap_factor == other.fbmc.overlap_factor &&
           fbmc.num_symbols == other.fbmc.num_symbols && fbmc.pam_order == other.fbmc.pam_order &&
           pdp.tap_delays == other.pdp.tap_delays && pdp.tap_powers == other.pdp.tap_powers &&
           num_antennas == other.num_antennas && num_users == other.num_users &&
           snr_in_db == other.snr_in_db && cont_eq(contamination, other.contamination) &&
           blind_eq(blind, other.blind) && trials == other.trials && seed == other.seed;
}

std::vector<double> measure_sinr_linear(const SymbolGrid& equalized,
                                        const SymbolGrid& transmitted, int guard_symbols) {
    if (equalized.num_subcarriers != transmitted.num_subcarriers ||
        equalized.num_symbols != transmitted.num_symbols) {
        throw ShapeError("equalized and transmitted grids must have identical dimensions");
    }
    const int L = equalized.num_subcarriers;
    const int N = equalized.num_symbols;
    const int lo = guard_symbols;
    const int hi = N - guard_symbols;
    if (lo < 0 || hi - lo < 2) {
        throw std::invalid_argument("guard_symbols leaves fewer than two steady-state instants");
    }

    std::vector<double> out(L, 0.0);
    for (int l = 0; l < L; ++l) {
        double ss = 0.0, zs = 0.0;
        for (int n = lo; n < hi; ++n) {
            const double s = transmitted.at(l, n);
            const double z = equalized.at(l, n);
            ss += s * s;
            zs += z * s;
        }
        if (ss == 0.0) {
            throw std::invalid_argument("zero-power transmitted slot at subcarrier " +
                                        std::to_string(l));
        }
        const double g = zs / ss;
        double err = 0.0;
        for (int n = lo; n < hi; ++n) {
            const double e = equalized.at(l, n) - g * transmitted.at(l, n);
            err += e * e;
        }
        const double signal = g * g * ss;
        const double cap = std::pow(10.0, kSinrCapDb / 10.0);
        if (err <= 0.0 || signal / err > cap) {
            out[l] = cap;
        } else {
            out[l] = std::max(signal / err, std::pow(10.0, -kSinrCapDb / 10.0));
        }
    }
    return out;
}

std::vector<double> measure_sinr(const SymbolGrid& equalized, const SymbolGrid& transmitted,
                                 int guard_symbols) {
    std::vector<double> lin = measure_sinr_linear(equalized, transmitted, guard_symbols);
    for (double& v : lin) v = 10.0 * std::log10(v);
    return lin;
}

SinrReport run_self_equalization(const Scenario& scenario, int max_threads) {
    scenario.validate();
    if (scenario.experiment != ExperimentKind::self_equalization) {
        throw ConfigError("scenario is not a self_equalization experiment");
    }
    const int L = scenario.fbmc.num_subcarriers;
    const int K = scenario.num_users;
    const int M = scenario.num_antennas;
    const PrototypeFilter filter = design_prototype(L, scenario.fbmc.overlap_factor);
    const double noise_var = std::max(noise_variance_for(scenario.snr_in_db), 1e-12);

    SinrReport report;
    report.scenario = scenario;
    report.target_db = target_sinr_db(scenario.snr_in_db, M);
    report.per_trial.resize(scenario.trials);

    run_parallel(scenario.trials, max_threads, [&](int t) {
        const std::uint64_t trial_seed = derive_seed(scenario.seed, t);
        const std::vector<double> unit_gains(K, 1.0);
        const ChannelSet ch = draw_channels(scenario.pdp, M, K, unit_gains,
                                            derive_seed(trial_seed, 0));

        Rng data_rng(derive_seed(trial_seed, 1));
        std::vector<SymbolGrid> tx;
        std::vector<TimeSignal> signals;
        tx.reserve(K);
        signals.reserve(K);
        for (int k = 0; k < K; ++k) {
            tx.push_back(random_pam_grid(scenario.fbmc, data_rng, k));
            signals.push_back(synthesize(tx.back(), scenario.fbmc, filter));
        }

        const std::vector<TimeSignal> rx =
            apply_channel(signals, ch, scenario.snr_in_db, derive_seed(trial_seed, 2));
        std::vector<ComplexGrid> antenna_grids;
        antenna_grids.reserve(M);
        for (int m = 0; m < M; ++m) {
            antenna_grids.push_back(analyze_complex(rx[m], scenario.fbmc, filter));
        }

        const ChannelEstimate est = ChannelEstimate::from_truth(frequency_response(ch, L));
        const CombinerWeights w_mf = mf_combiner(est);
        const CombinerWeights w_mmse = mmse_combiner(est, noise_var);

        const int guard = scenario.fbmc.overlap_factor;
        for (int c = 0; c < 2; ++c) {
            const std::vector<SymbolGrid> eq =
                combine(antenna_grids, c == SinrReport::kMf ? w_mf : w_mmse);
            std::vector<double> user_mean(L, 0.0);
            for (int k = 0; k < K; ++k) {
                const std::vector<double> lin = measure_sinr_linear(eq[k], tx[k], guard);
                for (int l = 0; l < L; ++l) user_mean[l] += lin[l];
            }
            std::vector<double>& dest = report.per_trial[t][c];
            dest.resize(L);
            for (int l = 0; l < L; ++l) {
                dest[l] = 10.0 * std::log10(user_mean[l] / K);
            }
        }
    });

    for (int c = 0; c < 2; ++c) {
        report.ensemble_mean_db[c].assign(L, 0.0);
        report.ensemble_var_db[c].assign(L, 0.0);
        for (int l = 0; l < L; ++l) {
            double mean = 0.0;
            for (int t = 0; t < scenario.trials; ++t) mean += report.per_trial[t][c][l];
            mean /= scenario.trials;
            double var = 0.0;
            for (int t = 0; t < scenario.trials; ++t) {
                const double d = report.per_trial[t][c][l] - mean;
                var += d * d;
            }
            report.ensemble_mean_db[c][l] = mean;
            report.ensemble_var_db[c][l] = scenario.trials > 1 ? var / (scenario.trials - 1) : 0.0;
        }
    }
    return report;
}

TrackingReport run_blind_tracking(const Scenario& scenario, int max_threads) {
    scenario.validate();
    if (scenario.experiment != ExperimentKind::blind_tracking) {
        throw ConfigError("scenario is not a blind_tracking experiment");
    }
    const ContaminationConfig& cont = *scenario.contamination;
    const BlindConfig& blind = *scenario.blind;
    const int L = scenario.fbmc.num_subcarriers;
    const int K = scenario.num_users;
    const int M = scenario.num_antennas;
    const int cells = cont.num_cells;
    const int total_users = K * cells;
    const PrototypeFilter filter = design_prototype(L, scenario.fbmc.overlap_factor);

    TrackingReport report;
    report.scenario = scenario;
    report.per_seed.resize(scenario.trials);

    run_parallel(scenario.trials, max_threads, [&](int t) {
        const std::uint64_t trial_seed = derive_seed(scenario.seed, t);

        // users are stacked home-cell first, then one cell at a time; the
        // interfering cells' large-scale gains carry the cross gains
        std::vector<double> gains(total_users, 1.0);
        for (int j = 1; j < cells; ++j) {
            for (int k = 0; k < K; ++k) {
                gains[static_cast<std::size_t>(j) * K + k] = cont.cross_gains[j - 1];
            }
        }
        const ChannelSet ch = draw_channels(scenario.pdp, M, total_users, gains,
                                            derive_seed(trial_seed, 0));

        Rng data_rng(derive_seed(trial_seed, 1));
        std::vector<SymbolGrid> tx;
        std::vector<TimeSignal> signals;
        tx.reserve(total_users);
        signals.reserve(total_users);
        for (int u = 0; u < total_users; ++u) {
            tx.push_back(random_pam_grid(scenario.fbmc, data_rng, u));
            signals.push_back(synthesize(tx.back(), scenario.fbmc, filter));
        }
        const std::vector<TimeSignal> rx =
            apply_channel(signals, ch, scenario.snr_in_db, derive_seed(trial_seed, 2));

        TrackingRealization real;
        real.fbmc = scenario.fbmc;
        real.antenna_grids.reserve(M);
        for (int m = 0; m < M; ++m) {
            real.antenna_grids.push_back(analyze_complex(rx[m], scenario.fbmc, filter));
        }
        real.home_tx.assign(tx.begin(), tx.begin() + K);
        real.noise_var = noise_variance_for(scenario.snr_in_db);

        const FrequencyResponse full = frequency_response(ch, L);
        real.stacked_truth = full;
        real.home_truth.num_antennas = M;
        real.home_truth.num_users = K;
        real.home_truth.num_subcarriers = L;
        real.home_truth.gains.resize(static_cast<std::size_t>(M) * K * L);
        for (int m = 0; m < M; ++m) {
            for (int k = 0; k < K; ++k) {
                for (int l = 0; l < L; ++l) {
                    real.home_truth.at(m, k, l) = full.at(m, k, l);
                }
            }
        }

        const PilotPlan plan = PilotPlan::make(K, L, derive_seed(trial_seed, 3));
        std::vector<FrequencyResponse> interferer_truths;
        interferer_truths.reserve(cells - 1);
        for (int j = 1; j < cells; ++j) {
            FrequencyResponse fr;
            fr.num_antennas = M;
            fr.num_users = K;
            fr.num_subcarriers = L;
            fr.gains.resize(static_cast<std::size_t>(M) * K * L);
            for (int m = 0; m < M; ++m) {
                for (int k = 0; k < K; ++k) {
                    for (int l = 0; l < L; ++l) {
                        fr.at(m, k, l) = full.at(m, j * K + k, l);
                    }
                }
            }
            interferer_truths.push_back(std::move(fr));
        }
        const std::vector<ComplexGrid> pilot_obs = simulate_pilot_reception(
            plan, real.home_truth, interferer_truths, cont, scenario.snr_in_db,
            derive_seed(trial_seed, 4));
        real.contaminated = estimate_channels(plan, pilot_obs, cont, scenario.snr_in_db);

        report.per_seed[t] = track(real, blind);
    });

    const int iters = blind.iterations;
    report.median_trace_db.resize(iters);
    for (int i = 0; i < iters; ++i) {
        std::vector<double> vals(scenario.trials);
        for (int t = 0; t < scenario.trials; ++t) {
            vals[t] = report.per_seed[t].sinr_db_per_iteration[i];
        }
        report.median_trace_db[i] = median_of(std::move(vals));
    }
    std::vector<double> noisy(scenario.trials), clean(scenario.trials), mmse(scenario.trials);
    for (int t = 0; t < scenario.trials; ++t) {
        noisy[t] = report.per_seed[t].mf_noisy_db;
        clean[t] = report.per_seed[t].mf_clean_db;
        mmse[t] = report.per_seed[t].mmse_clean_db;
    }
    report.median_mf_noisy_db = median_of(std::move(noisy));
    report.median_mf_clean_db = median_of(std::move(clean));
    report.median_mmse_clean_db = median_of(std::move(mmse));
    return report;
}

SweepAxis sweep_axis_from_string(const std::string& name) {
    if (name == "M") return SweepAxis::num_antennas;
    if (name == "L") return SweepAxis::num_subcarriers;
    if (name == "snr_in_db") return SweepAxis::snr_in_db;
    if (name == "beta") return SweepAxis::beta;
    throw ConfigError("unknown sweep axis '" + name + "' (expected M, L, snr_in_db or beta)");
}

std::string to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::num_antennas: return "M";
        case SweepAxis::num_subcarriers: return "L";
        case SweepAxis::snr_in_db: return "snr_in_db";
        case SweepAxis::beta: return "beta";
    }
    return "?";
}

SweepReport run_sweep(const Scenario& base, SweepAxis axis, const std::vector<double>& values,
                      int max_threads) {
    base.validate();
    SweepReport sweep;
    sweep.base = base;
    sweep.axis = axis;
    sweep.points.resize(values.size());

    for (std::size_t i = 0; i < values.size(); ++i) {
        SweepPoint& point = sweep.points[i];
        point.value = values[i];
        Scenario s = base;
        s.seed = derive_seed(base.seed, 0x5eed + i);
        try {
            switch (axis) {
                case SweepAxis::num_antennas:
                    s.num_antennas = static_cast<int>(values[i]);
                    break;
                case SweepAxis::num_subcarriers:
                    s.fbmc.num_subcarriers = static_cast<int>(values[i]);
                    break;
                case SweepAxis::snr_in_db:
                    s.snr_in_db = values[i];
                    break;
                case SweepAxis::beta: {
                    if (!s.contamination) {
                        throw ConfigError("beta sweep requires a contamination block");
                    }
                    for (double& b : s.contamination->cross_gains) b = values[i];
                    break;
                }
            }
            if (s.experiment == ExperimentKind::self_equalization) {
                point.report = run_self_equalization(s, max_threads);
            } else {
                point.report = run_blind_tracking(s, max_threads);
            }
        } catch (const std::exception& e) {
            point.error = e.what();
        }
    }
    return sweep;
}

}  // namespace fbmcmimo
