// SPDX-License-Identifier: Apache-2.0
#include "fbmcmimo/blind_tracking.hpp"

#include <cmath>
#include <string>

#include "fbmcmimo/errors.hpp"
#include "fbmcmimo/experiments.hpp"

namespace fbmcmimo {

void BlindConfig::validate() const {
    if (!(step_size > 0.0)) throw ConfigError("blind step_size must be positive");
    if (dispersion_constant < 0.0) {
        throw ConfigError("blind dispersion_constant must be positive (or 0 for auto)");
    }
    if (iterations < 1) throw ConfigError("blind iterations must be >= 1");
    if (block_size < 1) throw ConfigError("blind block_size must be >= 1");
}

double pam_dispersion_constant(int pam_order) {
    if (pam_order == 2) return 1.0;
    if (pam_order == 4) return 1.64;  // E[a^4]/E[a^2] for {+-1,+-3}/sqrt(5)
    throw ConfigError("pam_order must be 2 or 4, got " + std::to_string(pam_order));
}

double godard_cost(std::span<const double> outputs, double dispersion_constant) {
    if (outputs.empty()) {
        throw std::invalid_argument("godard_cost needs a non-empty output sequence");
    }
    double acc = 0.0;
    for (double z : outputs) {
        const double d = z * z - dispersion_constant;
        acc += d * d;
    }
    return acc / static_cast<double>(outputs.size());
}

std::vector<std::complex<double>> godard_gradient(std::span<const std::complex<double>> weights,
                                                  const BlockView& block,
                                                  double dispersion_constant) {
    const int M = block.num_antennas;
    const int B = block.num_instants;
    if (static_cast<int>(weights.size()) != M) {
        throw ShapeError("weight vector length does not match antenna count");
    }
    if (B < 1) throw std::invalid_argument("empty block");

    std::vector<std::complex<double>> grad(M, {0.0, 0.0});
    for (int n = 0; n < B; ++n) {
        std::complex<double> zc{0.0, 0.0};
        for (int m = 0; m < M; ++m) {
            zc += weights[m] * block.at(m, n);
        }
        const double z = zc.real();
        const double f = (z * z - dispersion_constant) * z;
        for (int m = 0; m < M; ++m) {
            grad[m] += f * std::conj(block.at(m, n));
        }
    }
    const double scale = 4.0 / static_cast<double>(B);
    for (std::complex<double>& g : grad) g *= scale;
    return grad;
}

void blind_update(std::vector<std::complex<double>>& weights, const BlockView& block,
                  const BlindConfig& cfg, double dispersion_constant, double initial_norm) {
    const int M = block.num_antennas;
    const int B = block.num_instants;
    if (static_cast<int>(weights.size()) != M) {
        throw ShapeError("weight vector length does not match antenna count");
    }
    if (B < 1) throw std::invalid_argument("empty block");

    // block output power for the normalized step
    double power = 0.0;
    for (int n = 0; n < B; ++n) {
        std::complex<double> zc{0.0, 0.0};
        for (int m = 0; m < M; ++m) zc += weights[m] * block.at(m, n);
        power += zc.real() * zc.real();
    }
    power /= static_cast<double>(B);
    const double mu = cfg.step_size / std::max(power, 1e-12);

    const std::vector<std::complex<double>> grad =
        godard_gradient(std::span<const std::complex<double>>(weights.data(), weights.size()),
                        block, dispersion_constant);
    double norm2 = 0.0;
    for (int m = 0; m < M; ++m) {
        weights[m] -= mu * grad[m];
        norm2 += std::norm(weights[m]);
    }
    if (!(std::sqrt(norm2) <= 1e6 * initial_norm)) {
        throw DivergenceError("blind adaptation diverged (weight norm exceeded 1e6 x initial); "
                              "reduce the step size");
    }
}

namespace {

// Per-subcarrier antenna outputs packed M x steady for cache-friendly sweeps.
struct PackedSubcarrier {
    std::vector<std::complex<double>> data;  // [m * count + n]
    int count = 0;
};

double mean_sinr_db(const std::vector<ComplexGrid>& antenna_grids,
                    const std::vector<SymbolGrid>& home_tx, const CombinerWeights& w,
                    int guard) {
    const std::vector<SymbolGrid> eq = combine(antenna_grids, w);
    const int L = w.num_subcarriers;
    std::vector<double> user_mean(L, 0.0);
    for (int k = 0; k < w.num_users; ++k) {
        const std::vector<double> lin = measure_sinr_linear(eq[k], home_tx[k], guard);
        for (int l = 0; l < L; ++l) user_mean[l] += lin[l];
    }
    double acc = 0.0;
    for (int l = 0; l < L; ++l) {
        acc += 10.0 * std::log10(std::max(user_mean[l] / w.num_users, 1e-20));
    }
    return acc / L;
}

}  // namespace

TrackingTrace track(const TrackingRealization& realization, const BlindConfig& cfg) {
    cfg.validate();
    realization.fbmc.validate();
    const int L = realization.fbmc.num_subcarriers;
    const int N = realization.fbmc.num_symbols;
    const int guard = realization.fbmc.overlap_factor;
    const int M = static_cast<int>(realization.antenna_grids.size());
    const int K = realization.contaminated.num_users;
    const double R = cfg.dispersion_constant > 0.0
                         ? cfg.dispersion_constant
                         : pam_dispersion_constant(realization.fbmc.pam_order);

    CombinerWeights w_init;
    if (cfg.init == BlindConfig::Init::custom) {
        if (!realization.custom_initial_weights) {
            throw ConfigError("blind init=custom requires custom_initial_weights");
        }
        w_init = *realization.custom_initial_weights;
    } else {
        w_init = mf_combiner(realization.contaminated);
    }

    TrackingTrace trace;
    trace.mf_noisy_db =
        mean_sinr_db(realization.antenna_grids, realization.home_tx, w_init, guard);
    trace.mf_clean_db = mean_sinr_db(
        realization.antenna_grids, realization.home_tx,
        mf_combiner(ChannelEstimate::from_truth(realization.home_truth)), guard);
    {
        // genie MMSE over home + interferer columns; keep the home rows
        const CombinerWeights full = mmse_combiner(
            ChannelEstimate::from_truth(realization.stacked_truth),
            std::max(realization.noise_var, 1e-12));
        CombinerWeights home;
        home.num_users = K;
        home.num_subcarriers = L;
        home.num_antennas = M;
        home.weights.resize(static_cast<std::size_t>(K) * L * M);
        for (int k = 0; k < K; ++k) {
            for (int l = 0; l < L; ++l) {
                for (int m = 0; m < M; ++m) {
                    home.at(k, l, m) = full.at(k, l, m);
                }
            }
        }
        trace.mmse_clean_db =
            mean_sinr_db(realization.antenna_grids, realization.home_tx, home, guard);
    }

    // steady-state instants only; filter tails stay out of the adaptation
    const int steady_lo = guard;
    const int steady_hi = N - guard;
    const int steady = steady_hi - steady_lo;
    std::vector<PackedSubcarrier> packed(L);
    for (int l = 0; l < L; ++l) {
        packed[l].count = steady;
        packed[l].data.resize(static_cast<std::size_t>(M) * steady);
        for (int m = 0; m < M; ++m) {
            const std::complex<double>* row =
                &realization.antenna_grids[m].values[static_cast<std::size_t>(l) * N];
            std::copy(row + steady_lo, row + steady_hi,
                      packed[l].data.begin() + static_cast<std::size_t>(m) * steady);
        }
    }

    CombinerWeights w = w_init;
    std::vector<double> initial_norm(static_cast<std::size_t>(K) * L, 0.0);
    for (int k = 0; k < K; ++k) {
        for (int l = 0; l < L; ++l) {
            double norm2 = 0.0;
            for (int m = 0; m < M; ++m) norm2 += std::norm(w.at(k, l, m));
            initial_norm[static_cast<std::size_t>(k) * L + l] = std::sqrt(norm2);
        }
    }

    trace.sinr_db_per_iteration.reserve(cfg.iterations);
    std::vector<std::complex<double>> slot_weights(M);
    for (int it = 0; it < cfg.iterations; ++it) {
        trace.sinr_db_per_iteration.push_back(
            mean_sinr_db(realization.antenna_grids, realization.home_tx, w, guard));
        if (it == cfg.iterations - 1) break;
        for (int k = 0; k < K; ++k) {
            for (int l = 0; l < L; ++l) {
                for (int m = 0; m < M; ++m) slot_weights[m] = w.at(k, l, m);
                const double w0 = initial_norm[static_cast<std::size_t>(k) * L + l];
                for (int b0 = 0; b0 < steady; b0 += cfg.block_size) {
                    BlockView block;
                    block.base = packed[l].data.data() + b0;
                    block.num_antennas = M;
                    block.num_instants = std::min(cfg.block_size, steady - b0);
                    block.stride = steady;
                    blind_update(slot_weights, block, cfg, R, w0);
                }
                for (int m = 0; m < M; ++m) w.at(k, l, m) = slot_weights[m];
            }
        }
    }
    return trace;
}

}  // namespace fbmcmimo
