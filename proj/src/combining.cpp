// SPDX-License-Identifier: Apache-2.0
#include "fbmcmimo/combining.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "fbmcmimo/errors.hpp"
#include "fbmcmimo/rng.hpp"

namespace fbmcmimo {

void ContaminationConfig::validate() const {
    if (num_cells < 1) throw ConfigError("contamination num_cells must be >= 1");
    if (cross_gains.size() != static_cast<std::size_t>(num_cells - 1)) {
        throw ConfigError("contamination needs " + std::to_string(num_cells - 1) +
                          " cross gains, got " + std::to_string(cross_gains.size()));
    }
    for (double b : cross_gains) {
        if (b < 0.0 || b > 1.0) {
            throw ConfigError("cross gains must lie in [0, 1], got " + std::to_string(b));
        }
    }
}

PilotPlan PilotPlan::make(int num_users, int num_subcarriers, std::uint64_t seed) {
    if (num_users < 1 || num_subcarriers < 1) {
        throw ConfigError("pilot plan needs num_users >= 1 and num_subcarriers >= 1");
    }
    PilotPlan plan;
    plan.num_users = num_users;
    plan.num_subcarriers = num_subcarriers;
    plan.symbols.resize(static_cast<std::size_t>(num_users) * num_subcarriers);
    Rng rng(seed);
    for (double& s : plan.symbols) s = rng.pam_symbol(2);
    return plan;
}

ChannelEstimate ChannelEstimate::from_truth(const FrequencyResponse& truth) {
    ChannelEstimate est;
    est.num_antennas = truth.num_antennas;
    est.num_users = truth.num_users;
    est.num_subcarriers = truth.num_subcarriers;
    est.gains = truth.gains;
    est.noise_var_estimate = 0.0;
    est.contaminated = false;
    return est;
}

std::vector<ComplexGrid> simulate_pilot_reception(
    const PilotPlan& plan, const FrequencyResponse& home,
    const std::vector<FrequencyResponse>& interferers, const ContaminationConfig& contamination,
    double snr_in_db, std::uint64_t seed) {
    contamination.validate();
    if (home.num_users != plan.num_users || home.num_subcarriers != plan.num_subcarriers) {
        throw ShapeError("pilot plan does not match the home-cell response dimensions");
    }
    const bool contaminate = contamination.shared_pilots && contamination.num_cells > 1;
    if (contaminate && interferers.size() != contamination.cross_gains.size()) {
        throw ShapeError("need one interfering-cell response per cross gain");
    }
    for (const FrequencyResponse& fr : interferers) {
        if (fr.num_antennas != home.num_antennas || fr.num_users != home.num_users ||
            fr.num_subcarriers != home.num_subcarriers) {
            throw ShapeError("interfering-cell responses must match the home-cell dimensions");
        }
    }

    const double noise_var = std::isinf(snr_in_db) ? 0.0 : std::pow(10.0, -snr_in_db / 10.0);
    Rng rng(seed);

    std::vector<ComplexGrid> obs(static_cast<std::size_t>(home.num_antennas));
    for (int m = 0; m < home.num_antennas; ++m) {
        ComplexGrid& grid = obs[m];
        grid = ComplexGrid(plan.num_subcarriers, plan.num_users);
        for (int k = 0; k < plan.num_users; ++k) {
            for (int l = 0; l < plan.num_subcarriers; ++l) {
                std::complex<double> h = home.at(m, k, l);
                if (contaminate) {
                    // interferer responses are already scaled by their
                    // sqrt(cross gain); shared pilots add them verbatim
                    for (const FrequencyResponse& fr : interferers) {
                        h += fr.at(m, k, l);
                    }
                }
                std::complex<double> y = h * plan.at(k, l);
                if (noise_var > 0.0) y += rng.circular_gaussian(noise_var);
                grid.at(l, k) = y;
            }
        }
    }
    return obs;
}

ChannelEstimate estimate_channels(const PilotPlan& plan,
                                  const std::vector<ComplexGrid>& pilot_observations,
                                  const ContaminationConfig& contamination, double snr_in_db) {
    contamination.validate();
    if (pilot_observations.empty()) {
        throw ShapeError("no pilot observations given");
    }
    for (const ComplexGrid& g : pilot_observations) {
        if (g.num_subcarriers != plan.num_subcarriers || g.num_symbols != plan.num_users) {
            throw ShapeError("pilot observation grid must be L x num_users");
        }
    }

    ChannelEstimate est;
    est.num_antennas = static_cast<int>(pilot_observations.size());
    est.num_users = plan.num_users;
    est.num_subcarriers = plan.num_subcarriers;
    est.gains.resize(static_cast<std::size_t>(est.num_antennas) * est.num_users *
                     est.num_subcarriers);
    est.noise_var_estimate = std::isinf(snr_in_db) ? 0.0 : std::pow(10.0, -snr_in_db / 10.0);
    est.contaminated = contamination.shared_pilots && contamination.num_cells > 1;
    if (est.contaminated) est.contamination_gains = contamination.cross_gains;

    for (int m = 0; m < est.num_antennas; ++m) {
        for (int k = 0; k < est.num_users; ++k) {
            for (int l = 0; l < est.num_subcarriers; ++l) {
                est.at(m, k, l) = pilot_observations[m].at(l, k) / plan.at(k, l);
            }
        }
    }
    return est;
}

CombinerWeights mf_combiner(const ChannelEstimate& estimate) {
    CombinerWeights w;
    w.num_users = estimate.num_users;
    w.num_subcarriers = estimate.num_subcarriers;
    w.num_antennas = estimate.num_antennas;
    w.weights.resize(static_cast<std::size_t>(w.num_users) * w.num_subcarriers * w.num_antennas);

    for (int k = 0; k < w.num_users; ++k) {
        for (int l = 0; l < w.num_subcarriers; ++l) {
            double energy = 0.0;
            for (int m = 0; m < w.num_antennas; ++m) {
                energy += std::norm(estimate.at(m, k, l));
            }
            if (energy == 0.0) {
                throw NumericalError("all-zero channel estimate for user " + std::to_string(k) +
                                     ", subcarrier " + std::to_string(l));
            }
            for (int m = 0; m < w.num_antennas; ++m) {
                w.at(k, l, m) = std::conj(estimate.at(m, k, l)) / energy;
            }
        }
    }
    return w;
}

CombinerWeights mmse_combiner(const ChannelEstimate& estimate, double noise_var) {
    if (!(noise_var > 0.0)) {
        throw ConfigError("mmse combiner needs noise_var > 0");
    }
    const int M = estimate.num_antennas;
    const int K = estimate.num_users;
    const int L = estimate.num_subcarriers;

    CombinerWeights w;
    w.num_users = K;
    w.num_subcarriers = L;
    w.num_antennas = M;
    w.weights.resize(static_cast<std::size_t>(K) * L * M);

    Eigen::MatrixXcd H(M, K);
    for (int l = 0; l < L; ++l) {
        for (int m = 0; m < M; ++m) {
            for (int k = 0; k < K; ++k) {
                H(m, k) = estimate.at(m, k, l);
            }
        }
        Eigen::MatrixXcd gram = H.adjoint() * H;
        gram.diagonal().array() += noise_var;
        // W = (H^H H + s I)^-1 H^H, rows are per-user weights
        const Eigen::MatrixXcd weights = gram.ldlt().solve(H.adjoint());
        if (!weights.allFinite()) {
            throw NumericalError("mmse solve produced non-finite weights at subcarrier " +
                                 std::to_string(l));
        }
        for (int k = 0; k < K; ++k) {
            for (int m = 0; m < M; ++m) {
                w.at(k, l, m) = weights(k, m);
            }
        }
    }
    return w;
}

std::vector<SymbolGrid> combine(const std::vector<ComplexGrid>& antenna_grids,
                                const CombinerWeights& weights) {
    if (antenna_grids.size() != static_cast<std::size_t>(weights.num_antennas)) {
        throw ShapeError("got " + std::to_string(antenna_grids.size()) + " antenna grids, weights expect " +
                         std::to_string(weights.num_antennas));
    }
    const int L = weights.num_subcarriers;
    const int N = antenna_grids.front().num_symbols;
    for (const ComplexGrid& g : antenna_grids) {
        if (g.num_subcarriers != L || g.num_symbols != N) {
            throw ShapeError("antenna grids must all be L x N with L matching the weights");
        }
    }

    std::vector<SymbolGrid> out;
    out.reserve(weights.num_users);
    std::vector<std::complex<double>> acc(static_cast<std::size_t>(N));
    for (int k = 0; k < weights.num_users; ++k) {
        SymbolGrid grid(L, N);
        grid.user_id = k;
        for (int l = 0; l < L; ++l) {
            std::fill(acc.begin(), acc.end(), std::complex<double>{0.0, 0.0});
            for (int m = 0; m < weights.num_antennas; ++m) {
                const std::complex<double> wm = weights.at(k, l, m);
                const std::complex<double>* row =
                    &antenna_grids[m].values[static_cast<std::size_t>(l) * N];
                for (int n = 0; n < N; ++n) {
                    acc[n] += wm * row[n];
                }
            }
            for (int n = 0; n < N; ++n) {
                grid.at(l, n) = acc[n].real();
            }
        }
        out.push_back(std::move(grid));
    }
    return out;
}

double target_sinr_db(double snr_in_db, int num_antennas) {
    if (num_antennas < 1) {
        throw ConfigError("target_sinr_db needs num_antennas >= 1");
    }
    return snr_in_db + 10.0 * std::log10(static_cast<double>(num_antennas));
}

}  // namespace fbmcmimo
