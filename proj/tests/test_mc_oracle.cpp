// SPDX-License-Identifier: Apache-2.0
//
// arraydist - spatial distribution of nonlinear distortion from antenna arrays
// Copyright (C) 2026 arraydist authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>

#include "arraydist/fft.hpp"
#include "arraydist/mc_oracle.hpp"
#include "arraydist/random.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

using namespace arraydist;
using Catch::Approx;

namespace
{
const double kDeg = kPi / 180.0;

std::string data_file(const std::string &name)
{
    return std::string(ARRAYDIST_DATA_DIR) + "/" + name;
}

struct Scenario
{
    PulseBank pulses;
    FrequencyGrid grid;
    TxConfig tx;
    SpectralMatrix Sxx;
};

// Single carrier T = 1, roll-off 0.22, driven to the given back-off of pa
Scenario single_carrier(const ChannelModel &ch, const std::string &precoder, const std::vector<double> &xi,
                        const MemoryPolynomialPA &pa, double backoff_db, int ppB)
{
    Scenario s;
    s.pulses = PulseBank::single_carrier(1.0, 0.22);
    s.grid = make_freq_grid(s.pulses.B, std::max(3, pa.max_order()), ppB);
    auto d = discretize(ch, s.pulses);
    s.tx.W = precode(d, PrecoderSpec::parse(precoder, 0.1), 1);
    s.tx.xi = PowerAllocation{xi};
    s.tx.pulses = s.pulses;
    const auto raw = analog_psd(s.tx.W, s.tx.xi, s.pulses, s.grid);
    const double target = pa.max_order() > 1 ? drive_power(pa, backoff_db) : 1.0;
    s.tx.amplitude = drive_amplitude(raw, target);
    s.Sxx = scale_to_mean_power(raw, target);
    return s;
}

SampleBlock white(std::size_t M, std::size_t L, std::uint64_t seed, double fs = 1.0)
{
    Rng rng(seed);
    SampleBlock b;
    b.fs = fs;
    b.samples.assign(M, std::vector<cplx>(L));
    for (auto &s : b.samples)
        for (auto &v : s)
            v = rng.cgauss();
    return b;
}
} // namespace

TEST_CASE("mc oracle: synthesized power matches the analytic spectrum", "[mc]")
{
    const auto geo = ArrayGeometry::uniform_linear(4, 0.5, 3e9);
    const auto lin = MemoryPolynomialPA::memoryless_pa({1.0}, "linear");
    auto s = single_carrier(los_model({0.3}, geo, true), "MR", {1.0}, lin, 0.0, 64);
    s.tx.amplitude = 1.0;
    const auto Sxx = analog_psd(s.tx.W, s.tx.xi, s.pulses, s.grid);
    const auto b = synthesize_tx(s.tx, 6, 3, 11, 100000);
    CHECK(b.length() == 600000);
    CHECK(b.fs == Approx(6.0));
    CHECK(b.psi >= 0.0);
    CHECK(b.psi < 1.0);
    const auto p = b.powers();
    const auto a = Sxx.antenna_powers();
    for (std::size_t m = 0; m < 4; ++m)
        CHECK(p[m] == Approx(a[m]).epsilon(0.01));

    // Same seed and block reproduce the waveform bit for bit; another block differs
    const auto again = synthesize_tx(s.tx, 6, 3, 11, 100000);
    CHECK(again.samples == b.samples);
    CHECK(synthesize_tx(s.tx, 6, 3, 11, 100000, 1).samples[0][0] != b.samples[0][0]);
}

TEST_CASE("mc oracle: root-raised-cosine waveform is confined to its band", "[mc]")
{
    const auto geo = ArrayGeometry::uniform_linear(2, 0.5, 3e9);
    const auto lin = MemoryPolynomialPA::memoryless_pa({1.0}, "linear");
    auto s = single_carrier(los_model({0.0}, geo, true), "MR", {1.0}, lin, 0.0, 64);
    const auto b = synthesize_tx(s.tx, 4, 3, 5, 8192);

    // Exact: the block spectrum vanishes beyond (1 + roll-off) / 2T
    const std::size_t L = b.length();
    std::vector<cplx> X = b.samples[0];
    FftPlan(L, FftPlan::Direction::Forward).execute(X);
    double in = 0.0, out = 0.0;
    for (std::size_t j = 0; j < L; ++j)
    {
        const double f = (j < L / 2 ? double(j) : double(j) - double(L)) * b.fs / double(L);
        (std::abs(f) <= 0.61 ? in : out) += std::norm(X[j]);
    }
    CHECK(out < 1e-20 * in);

    // Welch view: leakage beyond the band edge is below -60 dB of the peak a few bins out
    WelchConfig cfg;
    cfg.segment = 1024;
    const auto S = welch_cross_psd({b}, cfg);
    const auto d = S.diagonal(0);
    const double peak = *std::max_element(d.begin(), d.end());
    const double edge = 0.61 + 4.0 * S.grid().df();
    for (std::size_t i = 0; i < d.size(); ++i)
        if (std::abs(S.grid().at(i)) > edge)
            CHECK(d[i] < 1e-6 * peak);
}

TEST_CASE("mc oracle: precoded OFDM is close to complex Gaussian", "[mc]")
{
    const std::size_t M = 8, K = 10, N = 64;
    const auto geo = ArrayGeometry::uniform_linear(M, 0.5, 3e9);
    std::vector<double> ang;
    Rng rng(3);
    for (std::size_t k = 0; k < K; ++k)
        ang.push_back(rng.uniform(-80.0, 80.0) * kDeg);
    const auto pulses = PulseBank::ofdm(int(N), 1.0, 1.22, true);
    TxConfig tx;
    tx.W = precode(discretize(los_model(ang, geo, true), pulses), PrecoderSpec::parse("MR"), int(N));
    tx.xi = PowerAllocation::equal(K);
    tx.pulses = pulses;
    const auto b = synthesize_tx(tx, 6, 3, 9, N * 400);
    CHECK(b.fs == Approx(6.0 * N));
    CHECK(b.length() == 400 * 6 * N);

    double m2 = 0.0, m4 = 0.0;
    for (const auto &s : b.samples)
        for (const auto &v : s)
        {
            const double p = std::norm(v);
            m2 += p;
            m4 += p * p;
        }
    const double n = double(M * b.length());
    m2 /= n;
    m4 /= n;
    CHECK(m4 / (m2 * m2) == Approx(2.0).epsilon(0.02));

    // The low-pass output is strictly bandlimited to B
    const auto grid = make_freq_grid(pulses.B, 3, 160);
    const auto Sxx = analog_psd(tx.W, tx.xi, pulses, grid);
    const auto a = Sxx.antenna_powers();
    const auto p = b.powers();
    for (std::size_t m = 0; m < M; ++m)
        CHECK(p[m] == Approx(a[m]).epsilon(0.03));
}

TEST_CASE("mc oracle: Welch normalization, independence and leakage", "[mc]")
{
    WelchConfig cfg;
    cfg.segment = 1024;
    const auto w = white(2, 1 << 18, 21, 4.0);
    const auto S = welch_cross_psd({w}, cfg);
    CHECK(S.grid().df() == Approx(4.0 / 1024));
    CHECK(S.size() == 1023);
    const auto p = S.antenna_powers();
    CHECK(p[0] == Approx(1.0).epsilon(0.02));
    CHECK(p[1] == Approx(1.0).epsilon(0.02));

    // Independent streams: squared coherence at the 1 / segments level
    double coh = 0.0;
    for (std::size_t i = 0; i < S.size(); ++i)
    {
        const CMatrix A = S.at(i);
        coh += std::norm(A(0, 1)) / std::real(A(0, 0) * A(1, 1));
    }
    coh /= double(S.size());
    WelchAccumulator acc(2, 4.0, cfg);
    acc.add(w);
    CHECK(acc.segments() == 511);
    CHECK(coh < 4.0 / double(acc.segments()));
    CHECK(coh > 0.25 / double(acc.segments()));

    // Sinusoid half a bin off a bin centre: the Hann main lobe holds nearly all of the mass
    SampleBlock tone;
    tone.fs = 1.0;
    const double f0 = (100.5) / 1024.0;
    tone.samples.assign(1, std::vector<cplx>(1 << 15));
    for (std::size_t n = 0; n < tone.length(); ++n)
        tone.samples[0][n] = std::polar(1.0, 2.0 * kPi * f0 * double(n));
    const auto T = welch_cross_psd({tone}, cfg);
    const auto d = T.diagonal(0);
    const double total = T.antenna_powers()[0];
    double near = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
        if (std::abs(T.grid().at(i) - f0) <= 3.0 / 1024.0)
            near += d[i] * T.grid().df();
    CHECK(total == Approx(1.0).epsilon(1e-3));
    CHECK(near > 0.995 * total);

    WelchConfig bad = cfg;
    bad.segment = 1000;
    CHECK_THROWS_AS(bad.validate(), InputError);
    bad = cfg;
    bad.overlap = 0.95;
    CHECK_THROWS_AS(bad.validate(), InputError);
    CHECK_THROWS_AS(welch_cross_psd({white(1, 4096, 1)}, cfg), InputError); // 7 segments
    CHECK(parse_window("hamming") == WindowFamily::Hamming);
    CHECK_THROWS_AS(parse_window("kaiser"), InputError);
}

TEST_CASE("mc oracle: Bussgang split", "[mc]")
{
    const std::size_t L = 1000000;
    const auto x = white(1, L, 77);

    // Linear amplifier: nothing left over
    const auto lin = MemoryPolynomialPA::memoryless_pa({cplx(0.9, 0.1)}, "linear");
    auto s = bussgang_split(x, amplify(x, lin), b_to_a(lin, {1.0}));
    CHECK(s.power_d[0] == 0.0);

    // Cubic amplifier at unit drive
    const auto cubic = load_pa(data_file("cubic_pa.txt"));
    s = bussgang_split(x, amplify(x, cubic), b_to_a(cubic, {1.0}));
    CHECK(s.max_correlation() < 1e-2);
    CHECK(s.additivity_error() < 1e-2);
    CHECK(s.power_d[0] > 0.0);
    // Distortion power 2 |a3|^2 with a3 = b3 at order three
    CHECK(s.power_d[0] == Approx(2.0 * std::norm(cubic.coeff(3))).epsilon(0.03));

    // Reference amplifier seven decibels below compression
    const auto ref = load_pa(data_file("reference_pa.txt"));
    const double sigma = std::sqrt(drive_power(ref, 7.0));
    SampleBlock xs = x;
    for (auto &v : xs.samples[0])
        v *= sigma;
    s = bussgang_split(xs, amplify(xs, ref), b_to_a(ref, {sigma}));
    CHECK(s.max_correlation() < 1e-2);
    CHECK(s.additivity_error() < 1e-2);

    SampleBlock shorter = x;
    shorter.samples[0].resize(10);
    CHECK_THROWS_AS(bussgang_split(shorter, x, b_to_a(cubic, {1.0})), InputError);
}

TEST_CASE("mc oracle: analytic and Monte-Carlo spectra agree", "[mc][slow]")
{
    const auto geo = ArrayGeometry::uniform_linear(4, 0.5, 3e9);
    const auto ch = multipath_model(2024, 2, 20, 5.0, geo);
    const auto cubic = load_pa(data_file("cubic_pa.txt"));
    auto s = single_carrier(ch, "ZF", {0.5, 0.5}, cubic, 7.0, 2048);
    s.tx.synthesis = Synthesis::StationaryGaussian;
    const auto D = amplified_psd(s.Sxx, cubic);

    McSettings mc;
    const auto t0 = std::chrono::steady_clock::now();
    const auto rep = validate(D, s.tx, cubic, mc, 99, 0.5);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    INFO("yy " << rep.components[0].max_dev_db << " uu " << rep.components[1].max_dev_db << " dd "
               << rep.components[2].max_dev_db << " off " << rep.components[3].max_dev_db << " secs " << secs);
    CHECK(rep.samples >= (std::size_t{1} << 22));
    CHECK(rep.osf == 6);
    for (std::size_t c = 0; c < 3; ++c)
    {
        CHECK(rep.components[c].groups > 100);
        CHECK(rep.components[c].max_dev_db < 0.5);
    }
    CHECK(rep.bussgang_correlation < 1e-2);
    CHECK(rep.pass);
    CHECK(secs < 120.0);

    // Linear amplifier
    const auto lin = MemoryPolynomialPA::memoryless_pa({1.0}, "linear");
    const auto Dl = amplified_psd(s.Sxx, lin);
    mc.average_bins = 64; // a 0.1 dB bound needs wider averaging than the 0.5 dB one
    const auto rl = validate(Dl, s.tx, lin, mc, 5, 0.1);
    INFO("linear yy " << rl.components[0].max_dev_db);
    CHECK(rl.components[2].groups == 0);
    CHECK(rl.residual_power == 0.0);
    CHECK(rl.pass);

    // Negative control: the waveform is 3 dB hotter than the analytic model assumes
    mc.average_bins = 4;
    mc.samples = std::size_t{1} << 21;
    mc.drive_mismatch_db = 3.0;
    const auto neg = validate(D, s.tx, cubic, mc, 99, 0.5);
    CHECK_FALSE(neg.pass);
    CHECK(neg.components[2].max_dev_db > 3.0);
    mc.drive_mismatch_db = -3.0;
    CHECK_FALSE(validate(D, s.tx, cubic, mc, 99, 0.5).pass);
}

TEST_CASE("mc oracle: symbol-rate cyclostationarity of PAM input", "[mc][slow]")
{
    // i.i.d. symbols through a root-raised-cosine pulse are Gaussian at each instant but their variance
    // ripples at the symbol rate. The time-averaged input is stationary, not Gaussian, so the fourth- and
    // sixth-order moments behind the distortion differ from the stationary model. In band the
    // difference is small; in the shoulder towards 3B/2 it reaches several dB.
    const auto geo = ArrayGeometry::uniform_linear(4, 0.5, 3e9);
    const auto cubic = load_pa(data_file("cubic_pa.txt"));
    auto s = single_carrier(los_model({0.3, -0.5}, geo, true), "ZF", {0.5, 0.5}, cubic, 7.0, 2048);
    const auto D = amplified_psd(s.Sxx, cubic);
    McSettings mc;
    mc.samples = std::size_t{1} << 21;
    mc.band_limit = 0.5;
    const auto inband = validate(D, s.tx, cubic, mc, 4, 1.0);
    INFO("in band dd " << inband.components[2].max_dev_db);
    CHECK(inband.pass);
    mc.band_limit = 1.5;
    const auto wide = validate(D, s.tx, cubic, mc, 4, 1.0);
    INFO("full dd " << wide.components[2].max_dev_db << " at " << wide.components[2].at_f);
    CHECK(wide.components[2].max_dev_db > 2.0);
    CHECK(std::abs(wide.components[2].at_f) > 1.0 * s.pulses.B);
}

TEST_CASE("mc oracle: estimator variance halves with twice the samples", "[mc]")
{
    WelchConfig cfg;
    cfg.segment = 256;
    auto spread = [&](std::size_t L, std::uint64_t seed) {
        const auto S = welch_cross_psd({white(1, L, seed)}, cfg);
        const auto d = S.diagonal(0);
        double v = 0.0;
        for (double x : d)
            v += (x - 1.0) * (x - 1.0);
        return v / double(d.size());
    };
    double a = 0.0, b = 0.0;
    for (std::uint64_t seed = 0; seed < 8; ++seed)
    {
        a += spread(1 << 16, seed);
        b += spread(1 << 17, 100 + seed);
    }
    CHECK(a / b == Approx(2.0).epsilon(0.15));
}

TEST_CASE("mc oracle: input checks and sample dump", "[mc]")
{
    const auto geo = ArrayGeometry::uniform_linear(2, 0.5, 3e9);
    const auto lin = MemoryPolynomialPA::memoryless_pa({1.0}, "linear");
    auto s = single_carrier(los_model({0.1}, geo, true), "MR", {1.0}, lin, 0.0, 32);
    CHECK_THROWS_AS(synthesize_tx(s.tx, 2, 3, 1, 5000), InputError);
    CHECK_THROWS_AS(synthesize_tx(s.tx, 3, 3, 1, 5000), InputError); // 3/T < 3 B
    CHECK_THROWS_AS(synthesize_tx(s.tx, 6, 3, 1, 999), InputError);
    auto bad = s.tx;
    bad.xi = PowerAllocation{{0.7, 0.7}};
    CHECK_THROWS_AS(synthesize_tx(bad, 6, 3, 1, 5000), InputError);

    const auto b = synthesize_tx(s.tx, 6, 3, 1, 1000);
    std::stringstream ss;
    write_samples(ss, b);
    CHECK(ss.str().size() == 8 + 4 + 8 + 16 + 2 * 6000 * 16);
    const auto r = read_samples(ss);
    CHECK(r.samples == b.samples);
    CHECK(r.fs == b.fs);
    CHECK(r.psi == b.psi);
    std::stringstream junk("not a dump at all");
    CHECK_THROWS_AS(read_samples(junk), InputError);
}
