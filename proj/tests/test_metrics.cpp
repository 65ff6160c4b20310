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

#include "arraydist/hermitian_eig.hpp"
#include "arraydist/metrics.hpp"
#include "arraydist/random.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace arraydist;
using Catch::Approx;

namespace
{
const double kDeg = kPi / 180.0;

std::string data_file(const std::string &name)
{
    return std::string(ARRAYDIST_DATA_DIR) + "/" + name;
}

struct LosSetup
{
    ArrayGeometry geo;
    PulseBank pulses;
    FrequencyGrid grid;
    PrecodingMatrix W;
    SpectralMatrix Sxx;
};

// Narrowband LOS, MR, single carrier T = 1, driven at the given back-off of the PA
LosSetup los_mr(std::size_t M, const std::vector<double> &angles_deg, const std::vector<double> &xi, int order, int ppB,
                const MemoryPolynomialPA &pa, double backoff_db)
{
    LosSetup s;
    s.geo = ArrayGeometry::uniform_linear(M, 0.5, 3e9);
    s.pulses = PulseBank::single_carrier(1.0, 0.22);
    s.grid = make_freq_grid(s.pulses.B, order, ppB);
    std::vector<double> rad;
    for (double a : angles_deg)
        rad.push_back(a * kDeg);
    auto d = discretize(los_model(rad, s.geo, true), s.pulses);
    s.W = precode(d, PrecoderSpec::parse("MR"), 1);
    s.Sxx = scale_to_mean_power(analog_psd(s.W, PowerAllocation{xi}, s.pulses, s.grid), drive_power(pa, backoff_db));
    return s;
}
} // namespace

TEST_CASE("metrics: G_max definitions", "[metrics]")
{
    const std::size_t M = 8;
    CHECK(g_max_db(2.5 * CMatrix::Identity(M, M), 2.5 * M, M) == Approx(0.0).margin(1e-12));

    // rank-1 constant modulus, padded with zeros
    for (std::size_t n : {4, 16, 50})
    {
        CVector v(n);
        for (std::size_t m = 0; m < n; ++m)
            v(m) = std::polar(1.0, 0.37 * m * m);
        CMatrix S = v * v.adjoint() + CMatrix::Zero(n, n);
        CHECK(g_max_db(S, S.trace().real(), n) == Approx(10.0 * std::log10(double(n))).epsilon(1e-10));
    }
    CHECK_THROWS_AS(g_max_db(CMatrix::Identity(2, 2), 0.0, 2), InputError);

    // Never below 0 dBi when the total is the trace
    std::mt19937_64 rng(1);
    for (int t = 0; t < 20; ++t)
    {
        CMatrix S = testutil::random_psd(rng, 6, 1 + t % 6);
        CHECK(g_max_db(S, S.trace().real(), 6) >= -1e-12);
    }
}

TEST_CASE("metrics: single-user distortion directivity", "[metrics]")
{
    const auto pa = load_pa(data_file("reference_pa.txt"));
    auto s = los_mr(100, {20.0}, {1.0}, 9, 32, pa, 7.0);
    const auto D = amplified_psd(s.Sxx, pa);
    for (double f : {0.0, 0.4 * s.pulses.B, s.pulses.B, 1.3 * s.pulses.B})
        CHECK(distortion_gmax_db(D.Sdd, s.grid.nearest(f)) == Approx(20.0).margin(0.05));
}

TEST_CASE("metrics: G_max invariant under a common power scaling with matched drive", "[metrics]")
{
    const auto pa = load_pa(data_file("reference_pa.txt"));
    auto a = los_mr(32, {-20.0, 10.0, 40.0}, {0.2, 0.3, 0.5}, 9, 32, pa, 7.0);
    auto b = los_mr(32, {-20.0, 10.0, 40.0}, {0.1, 0.15, 0.25}, 9, 32, pa, 7.0);
    const auto Da = amplified_psd(a.Sxx, pa), Db = amplified_psd(b.Sxx, pa);
    const auto i = a.grid.nearest(a.pulses.B);
    CHECK(distortion_gmax_db(Da.Sdd, i) == Approx(distortion_gmax_db(Db.Sdd, i)).epsilon(1e-9));
}

TEST_CASE("metrics: rank of the third-order distortion", "[metrics][slow]")
{
    const auto cubic = load_pa(data_file("cubic_pa.txt"));
    // LOS, K = 4 distinct angles: (K^3 - K^2 + 2K)/2 = 28
    auto s = los_mr(100, {-41.0, -12.5, 7.0, 33.0}, {0.25, 0.25, 0.25, 0.25}, 3, 16, cubic, 7.0);
    const auto S3 = modulation_term(s.Sxx, 3);
    CHECK(numerical_rank(hermitian_eig(S3.at(s.grid.nearest(s.pulses.B))).values, 1e-9) == 28);

    // Random i.i.d. precoder columns: (K^3 + K^2)/2 = 40
    std::mt19937_64 rng(2);
    PrecodingMatrix W;
    W.W = {testutil::random_matrix(rng, 100, 4)};
    const auto Sr = analog_psd(W, PowerAllocation::equal(4), s.pulses, s.grid);
    const auto R3 = modulation_term(Sr, 3);
    CHECK(numerical_rank(hermitian_eig(R3.at(s.grid.nearest(0.3))).values, 1e-9) == 40);
}

TEST_CASE("metrics: adjacent distortion and its CCDF", "[metrics]")
{
    const std::size_t M = 8;
    auto geo = ArrayGeometry::uniform_linear(M, 0.5, 3e9);
    const auto grid = make_freq_grid(1.0, 3, 32);
    const double c = 0.01;
    const auto iso = SpectralMatrix::from_terms(grid, M, {{std::vector<double>(grid.size(), c), CMatrix::Identity(M, M)}});
    auto loc = ReceiverLocation::line_of_sight(geo, 0.3);
    loc.beta = 2.0;
    CHECK(adjacent_distortion(loc, iso, 0.5, 1.5) == Approx(2.0 * M * c * 1.0).epsilon(1e-12));
    CHECK(adjacent_distortion(loc, SpectralMatrix(grid, M), 0.5, 1.5) == 0.0);
    // Victim filter halves the band
    CHECK(adjacent_distortion(loc, iso, 0.5, 1.5, [](double f) { return f < 1.0 ? 1.0 : 0.0; }) ==
          Approx(2.0 * M * c * 0.5).margin(2.0 * M * c / 32));

    std::vector<ReceiverLocation> locs;
    Rng rng(3);
    for (int i = 0; i < 1000; ++i)
        locs.push_back(ReceiverLocation::line_of_sight(geo, rng.uniform(-0.5 * kPi, 0.5 * kPi)));
    const auto flat = adjacent_ccdf(locs, iso, 0.5, 1.5);
    CHECK(flat.value.size() <= 3); // vertical step, up to rounding
    CHECK(flat.value.back() == Approx(flat.value.front()).epsilon(1e-12));

    // A single dominant beam: heavy right tail, the largest sample sits in the beam
    CVector v = steering_vector(geo, 25.0 * kDeg).conjugate();
    const auto beam = SpectralMatrix::from_terms(grid, M, {{std::vector<double>(grid.size(), c), v * v.adjoint()}});
    const auto tail = adjacent_ccdf(locs, beam, 0.5, 1.5);
    CHECK(tail.value.back() > 20.0 * tail.value[tail.value.size() / 2]);
    CHECK(adjacent_distortion(ReceiverLocation::line_of_sight(geo, 25.0 * kDeg), beam, 0.5, 1.5) / M ==
          Approx(tail.value.back()).epsilon(0.05));

    locs.resize(999);
    CHECK_THROWS_AS(adjacent_ccdf(locs, iso, 0.5, 1.5), InputError);
}

TEST_CASE("metrics: ACLR and array ACLR", "[metrics]")
{
    const auto pa = load_pa(data_file("reference_pa.txt"));
    auto s = los_mr(4, {10.0}, {1.0}, 9, 64, pa, 7.0);
    const double B = s.pulses.B;
    CHECK(aclr_db(total_tx_psd(s.Sxx), B) == kDbFloor);

    const auto D = amplified_psd(s.Sxx, pa);
    const auto p = band_powers(total_tx_psd(D.Syy), B);
    CHECK(p.left == Approx(p.right).epsilon(1e-9));
    const double aclr = aclr_db(total_tx_psd(D.Syy), B);
    CHECK(aclr < -10.0);
    CHECK(aclr > -80.0);

    // One user, reference at the user: same ratio as the received ACLR
    auto ch = los_model({10.0 * kDeg}, s.geo, true);
    auto at_user = received_psd(D, ReceiverLocation::from_channel(ch, 0, s.grid));
    CHECK(array_aclr_db({at_user.linear}, at_user.total, B) ==
          Approx(10.0 * std::log10(std::max(band_powers(at_user.total, B).left, band_powers(at_user.total, B).right) /
                                   at_user.linear.integral(-0.5 * B, 0.5 * B))));

    // Isotropic distortion and orthogonal MR beams: array ACLR = ACLR - 10 log10(M xi_min)
    const std::size_t M = 16;
    auto geo = ArrayGeometry::uniform_linear(M, 0.5, 3e9);
    const double t0 = 0.1, t1 = std::asin(std::sin(t0) + 4.0 / M); // four nulls apart
    auto los = los_model({t0, t1}, geo, true);
    auto W = precode(discretize(los, s.pulses), PrecoderSpec::parse("MR"), 1);
    const std::vector<double> xi = {0.3, 0.7};
    const auto Suu = analog_psd(W, PowerAllocation{xi}, s.pulses, s.grid);
    std::vector<double> adj(s.grid.size(), 0.0);
    for (std::size_t i = 0; i < s.grid.size(); ++i)
        if (std::abs(s.grid.at(i)) > 0.5 * B && std::abs(s.grid.at(i)) < 1.5 * B)
            adj[i] = 1e-4;
    const auto Sdd = SpectralMatrix::from_terms(s.grid, M, {{adj, CMatrix::Identity(M, M)}});
    const auto Syy = Suu + Sdd;
    const double tx_aclr = aclr_db(total_tx_psd(Syy), B);
    std::vector<ScalarSpectrum> useful;
    for (std::size_t k = 0; k < 2; ++k)
        useful.push_back(received_component(Suu, ReceiverLocation::from_channel(los, k, s.grid)));
    const auto ref = received_component(Syy, ReceiverLocation::line_of_sight(geo, -0.7));
    CHECK(array_aclr_db(useful, ref, B) == Approx(tx_aclr - 10.0 * std::log10(M * 0.3)).margin(0.01));

    CHECK_THROWS_AS(aclr_db(total_tx_psd(s.Sxx), 10.0 * B), InputError);
}

TEST_CASE("metrics: link budget worked example", "[metrics]")
{
    LinkBudget one{40.0, 0.0, -140.0, -100.0, 1, -45.0};
    LinkBudget hundred{30.0, 20.0, -140.0, -100.0, 10, -35.0};
    CHECK(one.snr_db() == Approx(0.0).margin(1e-12));
    CHECK(hundred.snr_db() == Approx(0.0).margin(1e-12));
    CHECK(one.radiated_adjacent_dbm() == Approx(-5.0));
    CHECK(hundred.radiated_adjacent_dbm() == Approx(-5.0));
}

TEST_CASE("metrics: direction-count predictor", "[metrics]")
{
    const double B = 1.22, a = 1.22;
    CHECK(integration_area(0.5 * B, B) == Approx(B * B).epsilon(1e-15));
    CHECK(integration_area(1.5 * B, B) == Approx(0.0).margin(1e-15));
    CHECK(upsilon(B, B, a) == Approx(a * a * 0.375));

    auto p4 = predict_directions(std::vector<double>(4, 0.25), 1, B, B, a, 100, DirectionMode::General);
    CHECK(p4.count == 40.0);
    CHECK_FALSE(p4.omnidirectional);
    auto p1 = predict_directions({1.0}, 1, B, B, a, 100, DirectionMode::General);
    CHECK(p1.count == 1.0);
    auto p6 = predict_directions(std::vector<double>(6, 1.0 / 6), 1, B, B, a, 100, DirectionMode::General);
    CHECK(p6.count == 126.0);
    CHECK(p6.capped == 100.0);
    CHECK(p6.omnidirectional);
    auto los = predict_directions(std::vector<double>(4, 0.25), 1, B, B, a, 100, DirectionMode::LineOfSight);
    CHECK(los.count == 28.0);

    // Selective channel: (K^3+K^2)/2 L^2 upsilon(f), verdict exactly at the threshold
    for (int K = 1; K <= 6; ++K)
        for (double L : {2.0, 5.0, 10.0})
            for (double f : {0.5 * B, 0.9 * B, 1.2 * B, 1.45 * B})
            {
                auto p = predict_directions(std::vector<double>(K, 1.0 / K), L, f, B, a, 100, DirectionMode::General);
                const double formula = (K * K * K + K * K) / 2.0 * L * L * upsilon(f, B, a);
                if (L * L * upsilon(f, B, a) >= 1.0)
                {
                    CHECK(p.count == Approx(formula));
                    CHECK(p.omnidirectional == (formula >= 100.0));
                }
                CHECK(p.formula_in_range);
            }
    auto inband = predict_directions({0.5, 0.5}, 4, 0.1 * B, B, a, 100, DirectionMode::General);
    CHECK_FALSE(inband.formula_in_range);

    // Weak users do not count
    auto weak = predict_directions({0.5, 0.499, 0.001}, 1, B, B, a, 100, DirectionMode::General);
    CHECK(weak.significant_users == 2);
    CHECK(weak.count == 6.0);
    CHECK_THROWS_AS(predict_directions({}, 1, B, B, a, 100, DirectionMode::General), InputError);
}

TEST_CASE("metrics: average maximum power deviation", "[metrics]")
{
    auto geo = ArrayGeometry::uniform_linear(16, 0.5, 3e9);
    auto pulses = PulseBank::single_carrier(1.0, 0.22);
    Rng rng(4);
    std::vector<double> angles;
    for (int r = 0; r < 100; ++r)
        angles.push_back(rng.uniform(-1.5, 1.5));
    auto los = [&](std::size_t r) {
        return precode(discretize(los_model({angles[r]}, geo, true), pulses), PrecoderSpec::parse("MR"), 1);
    };
    CHECK(avg_max_power_deviation_db(los, {1.0}, 100) == Approx(0.0).margin(1e-12));

    const double T = 1.0e-8;
    auto sc = PulseBank::single_carrier(T, 0.22);
    auto fading = [&](std::size_t r) {
        return precode(discretize(multipath_model(100 + r, 1, 20, 2 * T, geo), sc), PrecoderSpec::parse("MR"), 1);
    };
    const double dev = avg_max_power_deviation_db(fading, {1.0}, 100);
    CHECK(dev > 1.0);
    CHECK(dev < 10.0 * std::log10(16.0));
    CHECK_THROWS_AS(avg_max_power_deviation_db(los, {1.0}, 99), InputError);

    // Parseval: tap energy equals the mean over theta of |W(theta)|^2
    auto P = fading(7);
    const auto p = per_antenna_power(P, {1.0});
    double mean0 = 0.0;
    for (int q = 0; q < 512; ++q)
        mean0 += std::norm(P.at(q / 512.0)(0, 0)) / 512.0;
    CHECK(p[0] == Approx(mean0).epsilon(1e-9));
}

TEST_CASE("metrics: two-tone prediction", "[metrics]")
{
    const double phi1 = los_phase(-15.0 * kDeg, 0.5, 1.0), phi2 = los_phase(5.0 * kDeg, 0.5, 1.0);
    const auto t = two_tone_predict(-50, 35, phi1, phi2);
    REQUIRE(t.size() == 4);
    CHECK(t[0].weight == 3);
    CHECK(t[1].weight == 3);
    CHECK(t[2].index == -135);
    CHECK(t[3].index == 120);
    CHECK(t[2].weight + t[3].weight + t[0].weight + t[1].weight == 8);
    CHECK(phase_to_angle(t[3].phase, 0.5) / kDeg == Approx(25.67).margin(0.05));
    CHECK(phase_to_angle(t[2].phase, 0.5) / kDeg == Approx(-37.2).margin(0.05));
    // Inversion oracle
    CHECK(phase_to_angle(t[3].phase, 0.5) == Approx(std::asin(2.0 * std::sin(5.0 * kDeg) - std::sin(-15.0 * kDeg))));
    CHECK(std::isnan(phase_to_angle(0.9 * kPi, 0.25)));
    CHECK_THROWS_AS(two_tone_predict(3, 3, 0.0, 0.0), InputError);
}

TEST_CASE("metrics: OFDM direction sets", "[metrics]")
{
    const std::vector<double> phi = {0.3, -1.1, 2.0};
    const int N = 12;
    std::vector<std::vector<std::size_t>> all(N, {0, 1, 2});
    for (int nu : {0, 5, 11})
    {
        auto d = ofdm_direction_sets(all, nu, phi);
        for (double p : phi)
            CHECK(d.contains(p));
    }

    // Two users on disjoint single tones reproduce the two-tone prediction
    std::vector<std::vector<std::size_t>> two(N);
    const int n1 = 4, n2 = 6;
    two[n1] = {0};
    two[n2] = {1};
    for (const auto &term : two_tone_predict(n1, n2, phi[0], phi[1]))
    {
        if (term.index < 0 || term.index >= N)
            continue;
        auto d = ofdm_direction_sets(two, term.index, phi);
        REQUIRE(d.counts.size() == 1);
        CHECK(d.contains(term.phase));
        CHECK(d.total() == static_cast<std::size_t>(term.weight));
    }

    // One user on one tone: a single direction at that tone
    std::vector<std::vector<std::size_t>> one(N);
    one[7] = {2};
    auto d = ofdm_direction_sets(one, 7, phi);
    CHECK(d.total() == 1);
    CHECK(d.contains(phi[2]));
    CHECK(ofdm_direction_sets(one, 6, phi).total() == 0);
    CHECK_THROWS_AS(ofdm_direction_sets(one, N, phi), InputError);
}

TEST_CASE("metrics: radiation pattern", "[metrics]")
{
    const auto pa = load_pa(data_file("reference_pa.txt"));
    auto s = los_mr(32, {-30.0}, {1.0}, 9, 32, pa, 7.0);
    const auto D = amplified_psd(s.Sxx, pa);
    const auto angles = angle_grid(0.25);
    CHECK(angles.size() == 721);
    auto pat = radiation_pattern(D, 0.0, angles, s.geo);
    std::size_t imax = 0;
    for (std::size_t i = 0; i < angles.size(); ++i)
        if (pat.linear[i] > pat.linear[imax])
            imax = i;
    CHECK(angles[imax] == Approx(-30.0).margin(0.25));
    // Gain over an isotropic radiator of the same total power
    const double iso = D.Suu.at(s.grid.nearest(0.0)).trace().real();
    CHECK(10.0 * std::log10(pat.linear[imax] / iso) == Approx(10.0 * std::log10(32.0)).margin(0.01));

    auto patB = radiation_pattern(D, s.pulses.B, angles, s.geo);
    std::size_t jmax = 0;
    for (std::size_t i = 0; i < angles.size(); ++i)
        if (patB.distortion[i] > patB.distortion[jmax])
            jmax = i;
    CHECK(angles[jmax] == Approx(-30.0).margin(0.25));
    CHECK(patB.per_order.size() == D.orders.size());
    CHECK_THROWS_AS(radiation_pattern(D, 100.0, angles, s.geo), InputError);

    const auto ev = eigen_spectrum(D.Sdd, s.pulses.B);
    CHECK(ev.size() == 32);
    CHECK(ev[0] > 0.0);
    CHECK(std::abs(ev[1]) < 1e-9 * ev[0]);
}
