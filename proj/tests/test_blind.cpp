// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "fbmcmimo/blind_tracking.hpp"
#include "fbmcmimo/errors.hpp"
#include "fbmcmimo/experiments.hpp"
#include "fbmcmimo/rng.hpp"

using namespace fbmcmimo;
using cd = std::complex<double>;

namespace {

struct Instance {
    std::vector<cd> weights;
    std::vector<cd> samples;  // M x B
    int M, B;

    BlockView view() const { return {samples.data(), M, B, B}; }
};

Instance random_instance(std::uint64_t seed, int M, int B) {
    Instance inst;
    inst.M = M;
    inst.B = B;
    Rng rng(seed);
    inst.weights.resize(M);
    for (auto& w : inst.weights) w = rng.circular_gaussian(1.0);
    inst.samples.resize(static_cast<std::size_t>(M) * B);
    for (auto& y : inst.samples) y = rng.circular_gaussian(1.0);
    return inst;
}

double cost_of(const std::vector<cd>& w, const BlockView& block, double R) {
    std::vector<double> z(block.num_instants);
    for (int n = 0; n < block.num_instants; ++n) {
        cd acc{0.0, 0.0};
        for (int m = 0; m < block.num_antennas; ++m) acc += w[m] * block.at(m, n);
        z[n] = acc.real();
    }
    return godard_cost(z, R);
}

}  // namespace

TEST_CASE("godard cost on the documented examples") {
    std::vector<double> on_circle = {1.0, -1.0, 1.0, -1.0};
    CHECK(godard_cost(on_circle, 1.0) == doctest::Approx(0.0));

    std::vector<double> zeros(5, 0.0);
    CHECK(godard_cost(zeros, 1.0) == doctest::Approx(1.0));

    std::vector<double> two = {0.5, 1.5};
    CHECK(godard_cost(two, 1.0) == doctest::Approx(1.0625));

    CHECK_THROWS_AS(godard_cost(std::vector<double>{}, 1.0), std::invalid_argument);
}

TEST_CASE("dispersion constant from the PAM alphabet") {
    CHECK(pam_dispersion_constant(2) == doctest::Approx(1.0));
    CHECK(pam_dispersion_constant(4) == doctest::Approx(1.64));
    CHECK_THROWS_AS(pam_dispersion_constant(3), ConfigError);
}

TEST_CASE("analytic gradient matches central finite differences on 100 random instances") {
    int checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int M = 2 + trial % 4;
        const int B = 3 + (trial * 7) % 40;
        const double R = trial % 2 == 0 ? 1.0 : 1.64;
        Instance inst = random_instance(1000 + trial, M, B);
        const BlockView block = inst.view();

        const auto grad = godard_gradient(inst.weights, block, R);

        const double eps = 1e-6;
        double num2 = 0.0, ref2 = 0.0;
        for (int m = 0; m < M; ++m) {
            std::vector<cd> wp = inst.weights, wm = inst.weights;
            wp[m] += eps;
            wm[m] -= eps;
            const double d_re = (cost_of(wp, block, R) - cost_of(wm, block, R)) / (2.0 * eps);
            wp = inst.weights;
            wm = inst.weights;
            wp[m] += cd{0.0, eps};
            wm[m] -= cd{0.0, eps};
            const double d_im = (cost_of(wp, block, R) - cost_of(wm, block, R)) / (2.0 * eps);
            const cd fd{d_re, d_im};
            num2 += std::norm(grad[m] - fd);
            ref2 += std::norm(fd);
        }
        CHECK(std::sqrt(num2) <= 1e-5 * std::max(std::sqrt(ref2), 1e-12));
        ++checked;
    }
    CHECK(checked == 100);
}

TEST_CASE("fixed point: outputs already on the dispersion circle leave weights unchanged") {
    // one antenna, w = 1, alternating +-1 samples: z^2 = R exactly
    std::vector<cd> w = {cd{1.0, 0.0}};
    std::vector<cd> samples = {cd{1.0, 0.0}, cd{-1.0, 0.0}, cd{1.0, 0.0}, cd{-1.0, 0.0}};
    BlockView block{samples.data(), 1, 4, 4};
    BlindConfig cfg;
    cfg.step_size = 0.1;
    blind_update(w, block, cfg, 1.0, 1.0);
    CHECK(w[0] == cd{1.0, 0.0});
}

TEST_CASE("zero step size leaves weights bit-identical") {
    Instance inst = random_instance(7, 4, 16);
    const std::vector<cd> before = inst.weights;
    BlindConfig cfg;
    cfg.step_size = 0.0;
    blind_update(inst.weights, inst.view(), cfg, 1.0, 1.0);
    CHECK(inst.weights == before);
}

TEST_CASE("pathologically large step size raises a divergence error") {
    Instance inst = random_instance(8, 4, 16);
    BlindConfig cfg;
    cfg.step_size = 1.0;  // 1000x the default
    const double init_norm = [&] {
        double n2 = 0.0;
        for (const auto& w : inst.weights) n2 += std::norm(w);
        return std::sqrt(n2);
    }();
    CHECK_THROWS_AS(
        [&] {
            for (int i = 0; i < 200; ++i) blind_update(inst.weights, inst.view(), cfg, 1.0, init_norm);
        }(),
        DivergenceError);
}

namespace {

// minimal single-cell realization: the modem pipeline is exercised end to
// end but with beta = 0 and noise-free estimates
TrackingRealization flat_realization(int M, int L, int N, double snr_db, std::uint64_t seed,
                                     bool flat_channel = false) {
    FbmcConfig cfg{L, 4, N, 2};
    const PrototypeFilter f = design_prototype(L, 4);
    const PowerDelayProfile pdp =
        flat_channel ? PowerDelayProfile::flat() : PowerDelayProfile::exponential(4, 1.0);
    const ChannelSet ch = draw_channels(pdp, M, 1, {1.0}, derive_seed(seed, 0));

    Rng data_rng(derive_seed(seed, 1));
    TrackingRealization real;
    real.fbmc = cfg;
    real.home_tx.push_back(random_pam_grid(cfg, data_rng));
    const TimeSignal x = synthesize(real.home_tx[0], cfg, f);
    const auto rx = apply_channel({x}, ch, snr_db, derive_seed(seed, 2));
    for (const auto& r : rx) real.antenna_grids.push_back(analyze_complex(r, cfg, f));
    real.home_truth = frequency_response(ch, L);
    real.stacked_truth = real.home_truth;
    real.contaminated = ChannelEstimate::from_truth(real.home_truth);
    real.noise_var = noise_variance_for(snr_db);
    return real;
}

}  // namespace

TEST_CASE("no contamination, clean estimates: trace hugs the clean-MF baseline") {
    // flat channel so the point-CSI MF weights are already the optimum; the
    // packet is long relative to the weight count so the tracker cannot
    // drift upward by fitting the noise realization
    const TrackingRealization real = flat_realization(8, 16, 512, 10.0, 99, true);
    BlindConfig cfg;
    cfg.step_size = 1e-3;
    cfg.iterations = 30;
    cfg.block_size = 32;
    const TrackingTrace trace = track(real, cfg);
    REQUIRE(static_cast<int>(trace.sinr_db_per_iteration.size()) == cfg.iterations);
    CHECK(trace.sinr_db_per_iteration[0] == doctest::Approx(trace.mf_noisy_db));
    for (double v : trace.sinr_db_per_iteration) {
        CHECK(std::abs(v - trace.mf_clean_db) < 0.5);
    }
}

TEST_CASE("track propagates divergence for an oversized step") {
    const TrackingRealization real = flat_realization(4, 16, 64, 10.0, 100);
    BlindConfig cfg;
    cfg.step_size = 1.0;
    cfg.iterations = 200;
    cfg.block_size = 8;
    CHECK_THROWS_AS(track(real, cfg), DivergenceError);
}

TEST_CASE("blind config validation") {
    BlindConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.step_size = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = BlindConfig{};
    cfg.iterations = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = BlindConfig{};
    cfg.block_size = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("sign flip of converged weights does not change the measured SINR") {
    const TrackingRealization real = flat_realization(8, 16, 128, 10.0, 101);
    const CombinerWeights w = mf_combiner(real.contaminated);
    CombinerWeights flipped = w;
    for (auto& v : flipped.weights) v = -v;
    const auto z1 = combine(real.antenna_grids, w);
    const auto z2 = combine(real.antenna_grids, flipped);
    const auto a = measure_sinr(z1[0], real.home_tx[0], 4);
    const auto b = measure_sinr(z2[0], real.home_tx[0], 4);
    for (std::size_t l = 0; l < a.size(); ++l) {
        CHECK(a[l] == doctest::Approx(b[l]).epsilon(1e-12));
    }
}
