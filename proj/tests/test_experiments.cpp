// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "fbmcmimo/errors.hpp"
#include "fbmcmimo/experiments.hpp"
#include "fbmcmimo/rng.hpp"

using namespace fbmcmimo;

namespace {

Scenario small_selfeq() {
    Scenario s;
    s.experiment = ExperimentKind::self_equalization;
    s.fbmc = FbmcConfig{16, 4, 32, 2};
    s.pdp = PowerDelayProfile::exponential(4, 2.0);
    s.num_antennas = 8;
    s.num_users = 2;
    s.snr_in_db = 5.0;
    s.trials = 6;
    s.seed = 42;
    return s;
}

Scenario small_tracking() {
    Scenario s;
    s.experiment = ExperimentKind::blind_tracking;
    s.fbmc = FbmcConfig{16, 4, 96, 2};
    s.pdp = PowerDelayProfile::exponential(4, 2.0);
    s.num_antennas = 8;
    s.num_users = 1;
    s.snr_in_db = 0.0;
    ContaminationConfig c;
    c.num_cells = 3;
    c.cross_gains = {0.3, 0.3};
    s.contamination = c;
    BlindConfig b;
    b.step_size = 1e-3;
    b.iterations = 12;
    b.block_size = 32;
    s.blind = b;
    s.trials = 4;
    s.seed = 7;
    return s;
}

}  // namespace

TEST_CASE("measure_sinr: exact recovery and pure scaling hit the cap") {
    SymbolGrid s(4, 16);
    Rng rng(3);
    for (auto& v : s.values) v = rng.pam_symbol(2);

    const auto exact = measure_sinr(s, s, 2);
    for (double v : exact) CHECK(v == doctest::Approx(200.0));

    SymbolGrid doubled = s;
    for (auto& v : doubled.values) v *= 2.0;
    const auto scaled = measure_sinr(doubled, s, 2);
    for (double v : scaled) CHECK(v == doctest::Approx(200.0));
}

TEST_CASE("measure_sinr: orthogonal error of power 0.01 reads 20 dB") {
    const int N = 2048;
    SymbolGrid s(1, N), z(1, N);
    Rng rng(5);
    for (int n = 0; n < N; ++n) s.at(0, n) = rng.pam_symbol(2);
    // build e orthogonal to s on the measured window, with power 0.01*E[s^2]
    std::vector<double> e(N);
    for (int n = 0; n < N; ++n) e[n] = rng.standard_normal();
    const int lo = 4, hi = N - 4;
    double es = 0.0, ss = 0.0;
    for (int n = lo; n < hi; ++n) {
        es += e[n] * s.at(0, n);
        ss += s.at(0, n) * s.at(0, n);
    }
    for (int n = 0; n < N; ++n) e[n] -= (es / ss) * s.at(0, n);
    double ee = 0.0;
    for (int n = lo; n < hi; ++n) ee += e[n] * e[n];
    const double scale = std::sqrt(0.01 * ss / ee);
    for (int n = 0; n < N; ++n) z.at(0, n) = s.at(0, n) + scale * e[n];

    const auto sinr = measure_sinr(z, s, 4);
    CHECK(sinr[0] == doctest::Approx(20.0).epsilon(0.025));
}

TEST_CASE("measure_sinr: scalar-fit invariance is exact") {
    SymbolGrid s(2, 64), z(2, 64);
    Rng rng(6);
    for (auto& v : s.values) v = rng.pam_symbol(2);
    for (std::size_t i = 0; i < z.values.size(); ++i) {
        z.values[i] = s.values[i] + 0.1 * rng.standard_normal();
    }
    const auto base = measure_sinr(z, s, 4);
    // power-of-two scales multiply every intermediate exactly: bit-identical
    for (double a : {-4.0, 0.5, 2.0}) {
        SymbolGrid za = z;
        for (auto& v : za.values) v *= a;
        const auto got = measure_sinr(za, s, 4);
        for (std::size_t l = 0; l < got.size(); ++l) CHECK(got[l] == base[l]);
    }
    // arbitrary scales are invariant up to rounding
    for (double a : {-3.0, 7.25}) {
        SymbolGrid za = z;
        for (auto& v : za.values) v *= a;
        const auto got = measure_sinr(za, s, 4);
        for (std::size_t l = 0; l < got.size(); ++l) {
            CHECK(std::abs(got[l] - base[l]) < 1e-10);
        }
    }
}

TEST_CASE("measure_sinr rejects zero-power slots and bad shapes") {
    SymbolGrid s(2, 16), z(2, 16);
    for (auto& v : z.values) v = 1.0;
    for (int n = 0; n < 16; ++n) s.at(0, n) = 1.0;  // subcarrier 1 all zero
    CHECK_THROWS_AS(measure_sinr(z, s, 2), std::invalid_argument);
    SymbolGrid wrong(2, 8);
    CHECK_THROWS_AS(measure_sinr(z, wrong, 2), ShapeError);
}

TEST_CASE("spreading-gain law on flat channels (scaled-down)") {
    Scenario s = small_selfeq();
    s.pdp = PowerDelayProfile::flat();
    s.num_users = 1;
    s.fbmc.num_symbols = 64;
    s.snr_in_db = 0.0;
    s.trials = 20;
    for (int M : {4, 16}) {
        s.num_antennas = M;
        const SinrReport r = run_self_equalization(s);
        const auto& mean = r.ensemble_mean_db[SinrReport::kMf];
        const double avg = std::accumulate(mean.begin(), mean.end(), 0.0) / mean.size();
        CHECK(std::abs(avg - target_sinr_db(0.0, M)) < 1.0);
    }
}

TEST_CASE("two equal flat antennas buy 3 dB over one (array-gain oracle)") {
    // deterministic unit channels; only the noise is random
    Scenario s = small_selfeq();
    s.pdp = PowerDelayProfile::flat();
    s.num_users = 1;
    s.fbmc.num_symbols = 64;
    s.snr_in_db = 3.0;
    s.trials = 100;
    double mean_db[2] = {0.0, 0.0};
    const int ms[2] = {1, 2};
    for (int i = 0; i < 2; ++i) {
        const int M = ms[i];
        double acc = 0.0;
        int count = 0;
        const FbmcConfig cfg = s.fbmc;
        const PrototypeFilter f = design_prototype(cfg.num_subcarriers, cfg.overlap_factor);
        for (int t = 0; t < s.trials; ++t) {
            ChannelSet ch;
            ch.num_antennas = M;
            ch.num_users = 1;
            ch.pdp = PowerDelayProfile::flat();
            ch.cell_gains = {1.0};
            ch.taps.assign(M, {1.0, 0.0});
            Rng rng(derive_seed(s.seed, t));
            const SymbolGrid tx = random_pam_grid(cfg, rng);
            const TimeSignal x = synthesize(tx, cfg, f);
            const auto rx = apply_channel({x}, ch, s.snr_in_db, derive_seed(t, 1));
            std::vector<ComplexGrid> grids;
            for (const auto& r : rx) grids.push_back(analyze_complex(r, cfg, f));
            const auto w = mf_combiner(ChannelEstimate::from_truth(frequency_response(ch, 16)));
            const auto eq = combine(grids, w);
            const auto lin = measure_sinr_linear(eq[0], tx, 4);
            for (double v : lin) {
                acc += v;
                ++count;
            }
        }
        mean_db[i] = 10.0 * std::log10(acc / count);
    }
    CHECK(mean_db[1] - mean_db[0] == doctest::Approx(3.0).epsilon(0.07));
}

TEST_CASE("degenerate single-antenna single-user flat case: MF and MMSE coincide") {
    Scenario s = small_selfeq();
    s.pdp = PowerDelayProfile::flat();
    s.num_users = 1;
    s.num_antennas = 1;
    s.fbmc.num_symbols = 64;
    s.snr_in_db = 10.0;
    s.trials = 5;
    const SinrReport r = run_self_equalization(s);
    for (std::size_t l = 0; l < r.ensemble_mean_db[0].size(); ++l) {
        CHECK(std::abs(r.ensemble_mean_db[SinrReport::kMf][l] -
                       r.ensemble_mean_db[SinrReport::kMmse][l]) < 0.1);
    }
}

TEST_CASE("self-equalization report is reproducible and well-shaped") {
    const Scenario s = small_selfeq();
    const SinrReport a = run_self_equalization(s, 2);
    const SinrReport b = run_self_equalization(s, 1);  // parallel vs serial
    REQUIRE(a.per_trial.size() == static_cast<std::size_t>(s.trials));
    for (int c = 0; c < 2; ++c) {
        CHECK(a.ensemble_mean_db[c].size() == static_cast<std::size_t>(s.fbmc.num_subcarriers));
        CHECK(a.ensemble_mean_db[c] == b.ensemble_mean_db[c]);
        CHECK(a.ensemble_var_db[c] == b.ensemble_var_db[c]);
        for (int t = 0; t < s.trials; ++t) CHECK(a.per_trial[t][c] == b.per_trial[t][c]);
    }
    CHECK(a.target_db == doctest::Approx(target_sinr_db(s.snr_in_db, s.num_antennas)));
}

TEST_CASE("tracking report is reproducible and carries its baselines") {
    const Scenario s = small_tracking();
    const TrackingReport a = run_blind_tracking(s, 2);
    const TrackingReport b = run_blind_tracking(s, 1);
    REQUIRE(a.per_seed.size() == static_cast<std::size_t>(s.trials));
    CHECK(a.median_trace_db.size() == static_cast<std::size_t>(s.blind->iterations));
    CHECK(a.median_trace_db == b.median_trace_db);
    CHECK(a.median_mf_noisy_db == b.median_mf_noisy_db);
    CHECK(a.median_mmse_clean_db == b.median_mmse_clean_db);
    // contaminated start sits below the clean baselines on this scenario
    CHECK(a.median_mf_noisy_db < a.median_mf_clean_db);
    CHECK(a.median_trace_db[0] == doctest::Approx(a.median_mf_noisy_db));
}

TEST_CASE("sweep: empty values, derived seeds, failure isolation") {
    const Scenario s = small_selfeq();
    const SweepReport empty = run_sweep(s, SweepAxis::num_antennas, {});
    CHECK(empty.points.empty());

    // L = 12 is not a power of two: that point fails, the others survive
    const SweepReport sw = run_sweep(s, SweepAxis::num_subcarriers, {16.0, 12.0});
    REQUIRE(sw.points.size() == 2);
    CHECK_FALSE(sw.points[0].failed());
    CHECK(sw.points[1].failed());
    CHECK(std::holds_alternative<SinrReport>(sw.points[0].report));

    const SinrReport& r0 = std::get<SinrReport>(sw.points[0].report);
    CHECK(r0.scenario.seed != s.seed);  // derived, not reused
}

TEST_CASE("sweep over M shows the expected 6 dB per 4x antenna step on flat channels") {
    Scenario s = small_selfeq();
    s.pdp = PowerDelayProfile::flat();
    s.num_users = 1;
    s.fbmc.num_symbols = 64;
    s.snr_in_db = 0.0;
    s.trials = 15;
    const SweepReport sw = run_sweep(s, SweepAxis::num_antennas, {4.0, 16.0});
    REQUIRE(sw.points.size() == 2);
    double means[2];
    for (int i = 0; i < 2; ++i) {
        const auto& m = std::get<SinrReport>(sw.points[i].report).ensemble_mean_db[SinrReport::kMf];
        means[i] = std::accumulate(m.begin(), m.end(), 0.0) / m.size();
    }
    CHECK(means[1] - means[0] == doctest::Approx(6.0).epsilon(0.17));
}

TEST_CASE("scenario validation wiring") {
    Scenario s = small_tracking();
    s.blind.reset();
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = small_tracking();
    s.contamination.reset();
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = small_selfeq();
    s.trials = 0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = small_selfeq();
    s.pdp = PowerDelayProfile::exponential(20, 4.0);  // longer than L=16
    CHECK_THROWS_AS(s.validate(), ConfigError);
}
