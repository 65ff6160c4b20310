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

#include "arraydist/experiment.hpp"

#include "arraydist/hermitian_eig.hpp"
#include "arraydist/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace arraydist
{

namespace
{
constexpr double kDeg = kPi / 180.0;

// Substream tags
constexpr std::uint64_t kTagAngles = 0x616e67;
constexpr std::uint64_t kTagChannel = 0x636861;
constexpr std::uint64_t kTagCcdf = 0x636364;
constexpr std::uint64_t kTagMc = 0x6d6363;

Schedule make_schedule(const Scenario &s, const PulseBank &pulses)
{
    if (s.waveform.schedule.empty())
        return {};
    Schedule out(pulses.count(), std::vector<bool>(s.channel.users, false));
    for (const auto &e : s.waveform.schedule)
    {
        auto &row = out[pulses.index_of(e.subcarrier)];
        if (e.users.empty())
            std::fill(row.begin(), row.end(), true);
        for (auto k : e.users)
            row[k] = true;
    }
    return out;
}

double target_power(const MemoryPolynomialPA &pa, double backoff_db)
{
    // Without compression the back-off is taken from unit input power
    if (pa.max_order() <= 1)
        return std::pow(10.0, -backoff_db / 10.0);
    return drive_power(pa, backoff_db);
}

// Strongest direction of S_dd at grid index i, refined to a hundredth of the coarse step
double peak_angle(const DistortionDecomposition &D, double f, const ArrayGeometry &geo, double step_deg)
{
    const auto coarse = angle_grid(step_deg);
    const auto pat = radiation_pattern(D, f, coarse, geo);
    const auto it = std::max_element(pat.distortion.begin(), pat.distortion.end());
    const double c = coarse[static_cast<std::size_t>(it - pat.distortion.begin())];
    std::vector<double> fine;
    for (int j = -100; j <= 100; ++j)
    {
        const double a = c + step_deg * j / 100.0;
        if (std::abs(a) <= 90.0)
            fine.push_back(a);
    }
    const auto pf = radiation_pattern(D, f, fine, geo);
    const auto jt = std::max_element(pf.distortion.begin(), pf.distortion.end());
    return fine[static_cast<std::size_t>(jt - pf.distortion.begin())];
}

std::vector<double> user_phases(const Setup &st)
{
    std::vector<double> phi;
    const double d = st.geometry.uniform_spacing();
    for (double a : st.scenario.channel.angles_deg)
        phi.push_back(los_phase(a * kDeg, d, st.geometry.wavelength()));
    return phi;
}
} // namespace

Setup build_setup(const Scenario &s)
{
    Setup st;
    st.scenario = s;
    const auto &c = s.channel;
    const auto &w = s.waveform;
    const double T = w.symbol_period_s;

    st.geometry = ArrayGeometry::uniform_linear(s.array.antennas, s.array.spacing_wavelengths, s.array.carrier_hz);
    if (c.type == "los")
    {
        if (st.scenario.channel.angles_deg.empty())
        {
            Rng rng(substream(s.seed, kTagAngles));
            for (std::size_t k = 0; k < c.users; ++k)
                st.scenario.channel.angles_deg.push_back(rng.uniform(c.angle_low_deg, c.angle_high_deg));
        }
        std::vector<double> rad;
        for (double a : st.scenario.channel.angles_deg)
            rad.push_back(a * kDeg);
        st.channel = los_model(rad, st.geometry, c.narrowband, substream(s.seed, kTagChannel));
    }
    else
        st.channel = multipath_model(substream(s.seed, kTagChannel), c.users, c.paths, c.delay_spread_symbols * T,
                                     st.geometry);

    st.pulses = w.type == "ofdm" ? PulseBank::ofdm(w.subcarriers, T, w.excess_bandwidth, w.lowpass)
                                 : PulseBank::single_carrier(T, w.rolloff);
    st.pa = load_pa(s.amplifier.resolved_path);
    st.order = s.grid.order > 0 ? s.grid.order : std::max(3, st.pa.max_order());
    st.grid = make_freq_grid(st.pulses.B, st.order, s.grid.points_per_b);

    st.discrete = discretize(st.channel, st.pulses);
    st.precoder = PrecoderSpec::parse(s.precoder.kind, s.precoder.lambda);
    st.W = precode(st.discrete, st.precoder, st.pulses.N);
    st.xi = s.power.empty() ? PowerAllocation::equal(c.users) : PowerAllocation{s.power};
    st.schedule = make_schedule(s, st.pulses);

    const auto raw = analog_psd(st.W, st.xi, st.pulses, st.grid, st.schedule);
    st.drive = target_power(st.pa, s.amplifier.backoff_db);
    st.Sxx = scale_to_mean_power(raw, st.drive);

    st.tx.synthesis = s.mc.synthesis;
    st.tx.W = st.W;
    st.tx.xi = st.xi;
    st.tx.pulses = st.pulses;
    st.tx.schedule = st.schedule;
    st.tx.amplitude = drive_amplitude(raw, st.drive);
    return st;
}

DistortionDecomposition analyze(const Setup &setup)
{
    return amplified_psd(setup.Sxx, setup.pa);
}

RunMetrics compute_metrics(const Setup &st, const DistortionDecomposition &D)
{
    RunMetrics r;
    const double B = st.B();
    const auto &grid = D.grid();
    const std::size_t M = D.antennas();

    r.aclr_db = aclr_db(total_tx_psd(D.Syy), B);
    r.psd_floor = D.psd_floor;
    r.input_power = D.Sxx.antenna_powers();
    for (const auto &t : D.order_terms)
    {
        const auto p = t.antenna_powers();
        double s = 0.0;
        for (double x : p)
            s += x;
        r.order_power.push_back(s / static_cast<double>(M));
    }

    std::vector<ScalarSpectrum> useful;
    for (std::size_t k = 0; k < st.channel.users(); ++k)
    {
        const auto loc = ReceiverLocation::from_channel(st.channel, k, grid);
        const auto rx = received_psd(D, loc);
        r.user_aclr_db.push_back(aclr_db(rx.total, B));
        useful.push_back(rx.linear);
    }
    r.array_aclr_db = -std::numeric_limits<double>::infinity();
    for (double a : angle_grid(st.scenario.metrics.pattern_step_deg))
    {
        const auto ref = received_component(D.Syy, ReceiverLocation::line_of_sight(st.geometry, a * kDeg));
        const double v = array_aclr_db(useful, ref, B);
        if (v > r.array_aclr_db)
        {
            r.array_aclr_db = v;
            r.array_aclr_angle_deg = a;
        }
    }

    for (double fb : st.scenario.metrics.eigen_f_over_b)
    {
        r.gmax_f_over_b.push_back(fb);
        r.gmax_db.push_back(distortion_gmax_db(D.Sdd, grid.nearest(fb * B)));
    }
    r.max_power_ratio_db = 10.0 * std::log10(max_power_ratio(per_antenna_power(st.W, st.xi.xi)));

    auto &ds = r.directions;
    ds.f = B;
    if (!st.discrete.taps.empty())
    {
        std::size_t L = 1;
        for (std::size_t k = 0; k < st.channel.users(); ++k)
            for (std::size_t m = 0; m < M; ++m)
                L = std::max(L, st.discrete.significant_taps(k, m));
        ds.L = static_cast<double>(L);
    }
    else if (!st.channel.narrowband)
    {
        // OFDM: delay taps spanned at the sample rate B
        double span = 0.0;
        for (const auto &user : st.channel.paths)
        {
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (const auto &p : user)
            {
                lo = std::min(lo, p.delay_s);
                hi = std::max(hi, p.delay_s);
            }
            if (!user.empty())
                span = std::max(span, hi - lo);
        }
        ds.L = std::max(1.0, std::ceil(span * B));
    }
    const bool los = st.line_of_sight() && st.channel.narrowband;
    ds.prediction = predict_directions(st.xi.xi, ds.L, ds.f, B, B * st.pulses.T, M,
                                       los ? DirectionMode::LineOfSight : DirectionMode::General);
    if (st.order >= 3)
    {
        const auto &S3 = D.order_term(3);
        ds.numerical_rank = numerical_rank(hermitian_eig(S3.at(grid.nearest(ds.f))).values,
                                           st.scenario.metrics.eigen_rank_threshold);
    }
    return r;
}

std::vector<EigenResult> eigen_analysis(const Setup &st, const DistortionDecomposition &D)
{
    std::vector<EigenResult> out;
    const double B = st.B();
    const double thr = st.scenario.metrics.eigen_rank_threshold;
    for (double fb : st.scenario.metrics.eigen_f_over_b)
    {
        EigenResult e;
        e.f = D.grid().at(D.grid().nearest(fb * B));
        e.values = eigen_spectrum(D.Sdd, e.f);
        Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(e.values.data(), static_cast<Eigen::Index>(e.values.size()));
        e.rank = e.values.empty() || !(e.values[0] > 0.0) ? 0 : numerical_rank(v, thr);
        if (st.order >= 3)
        {
            e.values3 = eigen_spectrum(D.order_term(3), e.f);
            Eigen::VectorXd v3 =
                Eigen::Map<const Eigen::VectorXd>(e.values3.data(), static_cast<Eigen::Index>(e.values3.size()));
            e.rank3 = e.values3.empty() || !(e.values3[0] > 0.0) ? 0 : numerical_rank(v3, thr);
        }
        e.gmax_db = distortion_gmax_db(D.Sdd, D.grid().nearest(e.f));
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<RadiationPattern> patterns(const Setup &st, const DistortionDecomposition &D,
                                       const std::vector<double> &frequencies)
{
    const auto angles = angle_grid(st.scenario.metrics.pattern_step_deg);
    std::vector<RadiationPattern> out;
    for (double f : frequencies)
        out.push_back(radiation_pattern(D, f, angles, st.geometry));
    return out;
}

CcdfTable ccdf_analysis(const Setup &st, const DistortionDecomposition &D)
{
    const auto &ms = st.scenario.metrics;
    const double B = st.B();
    const double lo = ms.adjacent_lo_over_b * B, hi = ms.adjacent_hi_over_b * B;
    std::vector<double> v;
    v.reserve(ms.ccdf_count);
    Rng rng(substream(st.scenario.seed, kTagCcdf));
    for (std::size_t i = 0; i < ms.ccdf_count; ++i)
    {
        ReceiverLocation loc;
        if (ms.ccdf_locations == "los")
            loc = ReceiverLocation::line_of_sight(st.geometry, rng.uniform(-0.5 * kPi, 0.5 * kPi));
        else
        {
            const auto ch = multipath_model(substream(st.scenario.seed, kTagCcdf, i + 1), 1, st.scenario.channel.paths,
                                            st.scenario.channel.delay_spread_symbols * st.pulses.T, st.geometry);
            loc = ReceiverLocation::from_channel(ch, 0, D.grid());
        }
        // Same normalization as adjacent_ccdf, one location at a time to bound memory
        double n2 = 0.0;
        for (const auto &h : loc.h)
            n2 += h.squaredNorm();
        n2 *= loc.beta / static_cast<double>(loc.h.size());
        v.push_back(adjacent_distortion(loc, D.Sdd, lo, hi) / n2);
    }
    return make_ccdf(std::move(v));
}

TwoToneResult two_tone_analysis(const Setup &st, const DistortionDecomposition &D)
{
    const auto &s = st.scenario;
    if (s.waveform.type != "ofdm")
        throw InputError("two-tone: waveform.type must be ofdm");
    if (!st.line_of_sight() || !st.channel.narrowband)
        throw InputError("two-tone: a narrowband los channel is required");
    if (s.waveform.schedule.size() != 2)
        throw InputError("two-tone: waveform.schedule must list exactly two subcarriers");
    for (const auto &e : s.waveform.schedule)
        if (e.users.size() != 1)
            throw InputError("two-tone: each scheduled subcarrier must carry exactly one user");

    TwoToneResult r;
    const auto &e1 = s.waveform.schedule[0], &e2 = s.waveform.schedule[1];
    r.nu1 = e1.subcarrier;
    r.nu2 = e2.subcarrier;
    r.theta1_deg = s.channel.angles_deg[e1.users[0]];
    r.theta2_deg = s.channel.angles_deg[e2.users[0]];
    const auto phi = user_phases(st);
    const double dl = s.array.spacing_wavelengths;
    const double step = s.metrics.pattern_step_deg;
    const auto angles = angle_grid(step);

    for (const auto &t : two_tone_predict(r.nu1, r.nu2, phi[e1.users[0]], phi[e2.users[0]]))
    {
        const double f = t.index * st.pulses.f0;
        if (std::abs(f) > D.grid().f_max())
            continue;
        TwoToneLine l;
        l.subcarrier = t.index;
        l.f = f;
        l.weight = t.weight;
        l.intermodulation = t.index != r.nu1 && t.index != r.nu2;
        l.predicted_deg = phase_to_angle(t.phase, dl) / kDeg;
        l.peak_deg = peak_angle(D, f, st.geometry, step);
        l.error_deg = std::isnan(l.predicted_deg) ? std::numeric_limits<double>::quiet_NaN()
                                                  : std::abs(l.peak_deg - l.predicted_deg);
        r.lines.push_back(l);
        r.patterns.push_back(radiation_pattern(D, f, angles, st.geometry));
    }
    return r;
}

ValidationReport mc_validation(const Setup &st, const DistortionDecomposition &D)
{
    const auto &mc = st.scenario.mc;
    return validate(D, st.tx, st.pa, mc.settings, substream(st.scenario.seed, kTagMc), mc.tolerance_db);
}

} // namespace arraydist
