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

#include "arraydist/metrics.hpp"

#include "arraydist/hermitian_eig.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace arraydist
{

double g_max_db(const CMatrix &Sdd, double Stx, std::size_t M)
{
    if (!(Stx > 0.0))
        throw InputError("g_max: total transmitted PSD is zero at this frequency");
    const CMatrix H = 0.5 * (Sdd + Sdd.adjoint());
    return 10.0 * std::log10(static_cast<double>(M) * largest_eigenvalue(H) / Stx);
}

double distortion_gmax_db(const SpectralMatrix &Sdd, std::size_t i)
{
    const CMatrix S = Sdd.at(i);
    const double tr = S.trace().real();
    if (!(tr > 0.0))
        return std::numeric_limits<double>::quiet_NaN();
    return g_max_db(S, tr, Sdd.dim());
}

double adjacent_distortion(const ReceiverLocation &loc, const SpectralMatrix &Sdd, double lo, double hi,
                           const VictimFilter &victim)
{
    const auto &g = Sdd.grid();
    if (g.f_min() > lo + 0.5 * g.df() || g.f_max() < hi - 0.5 * g.df())
        throw InputError("adjacent_distortion: grid does not cover the adjacent band");
    const auto r = received_component(Sdd, loc);
    const auto w = g.band_weights(lo, hi);
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
        if (w[i] > 0.0)
            s += w[i] * r.values[i] * (victim ? victim(g.at(i)) : 1.0);
    return s;
}

CcdfTable make_ccdf(std::vector<double> samples)
{
    std::sort(samples.begin(), samples.end());
    CcdfTable t;
    const double n = static_cast<double>(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
    {
        // equal samples share the CCDF of their first occurrence
        if (i > 0 && samples[i] == samples[i - 1])
            continue;
        t.value.push_back(samples[i]);
        t.ccdf.push_back((n - static_cast<double>(i)) / n);
    }
    return t;
}

CcdfTable adjacent_ccdf(const std::vector<ReceiverLocation> &locations, const SpectralMatrix &Sdd, double lo, double hi,
                        const VictimFilter &victim)
{
    if (locations.size() < 1000)
        throw InputError("adjacent_ccdf: at least 1000 locations required, got " + std::to_string(locations.size()));
    std::vector<double> v;
    v.reserve(locations.size());
    for (const auto &loc : locations)
    {
        double n2 = 0.0;
        for (std::size_t i = 0; i < loc.h.size(); ++i)
            n2 += loc.h[i].squaredNorm();
        n2 *= loc.beta / static_cast<double>(loc.h.size());
        v.push_back(adjacent_distortion(loc, Sdd, lo, hi, victim) / n2);
    }
    return make_ccdf(std::move(v));
}

BandPowers band_powers(const ScalarSpectrum &S, double B)
{
    const auto &g = S.grid;
    if (g.f_max() + 0.5 * g.df() < 1.5 * B * (1.0 - 1e-12))
        throw InputError("aclr: grid must cover [-3B/2, 3B/2]");
    return {S.integral(-0.5 * B, 0.5 * B), S.integral(-1.5 * B, -0.5 * B), S.integral(0.5 * B, 1.5 * B)};
}

double to_db(double ratio)
{
    if (!(ratio > 0.0))
        return kDbFloor;
    return std::max(kDbFloor, 10.0 * std::log10(ratio));
}

double aclr_db(const ScalarSpectrum &Stx, double B)
{
    const auto p = band_powers(Stx, B);
    if (!(p.in_band > 0.0))
        throw InputError("aclr: no in-band power");
    return to_db(std::max(p.left, p.right) / p.in_band);
}

double array_aclr_db(const std::vector<ScalarSpectrum> &useful_linear, const ScalarSpectrum &reference, double B)
{
    if (useful_linear.empty())
        throw InputError("array_aclr: at least one served user required");
    double useful = std::numeric_limits<double>::infinity();
    for (const auto &s : useful_linear)
        useful = std::min(useful, s.integral(-0.5 * B, 0.5 * B));
    if (!(useful > 0.0))
        throw InputError("array_aclr: a served user receives no useful power");
    const auto p = band_powers(reference, B);
    return to_db(std::max(p.left, p.right) / useful);
}

double LinkBudget::snr_db() const
{
    return tx_power_dbm - 10.0 * std::log10(static_cast<double>(users)) + array_gain_dbi + path_loss_db - noise_dbm;
}

double LinkBudget::radiated_adjacent_dbm() const
{
    return tx_power_dbm + aclr_db;
}

double integration_area(double f, double B)
{
    return 15.0 / 8.0 * B * B - 2.0 * B * f + 0.5 * f * f;
}

double upsilon(double f, double B, double a)
{
    return a * a * integration_area(f, B) / (B * B);
}

DirectionPrediction predict_directions(const std::vector<double> &xi, double L, double f, double B, double a,
                                       std::size_t M, DirectionMode mode)
{
    if (xi.empty())
        throw InputError("predict_directions: at least one user required");
    if (!(L >= 1.0))
        throw InputError("predict_directions: L must be >= 1");
    DirectionPrediction p;
    const double top = *std::max_element(xi.begin(), xi.end());
    for (double x : xi)
        if (x >= 0.01 * top && x > 0.0)
            ++p.significant_users;
    const double K = static_cast<double>(p.significant_users);
    if (mode == DirectionMode::LineOfSight)
        p.count = (K * K * K - K * K + 2.0 * K) / 2.0;
    else
    {
        const double base = (K * K * K + K * K) / 2.0;
        const double af = std::abs(f);
        p.formula_in_range = af >= 0.5 * B * (1.0 - 1e-12) && af <= 1.5 * B * (1.0 + 1e-12);
        // Each of the base terms spreads over about L^2 upsilon(f) directions, and over at least one
        const double spread = p.formula_in_range ? std::max(1.0, L * L * upsilon(af, B, a)) : 1.0;
        p.count = base * spread;
    }
    p.capped = std::min(static_cast<double>(M), p.count);
    p.omnidirectional = p.count >= static_cast<double>(M);
    return p;
}

std::vector<double> per_antenna_power(const PrecodingMatrix &W, const std::vector<double> &xi)
{
    const std::size_t M = W.antennas(), K = W.users();
    if (xi.size() != K)
        throw InputError("per_antenna_power: allocation size differs from user count");
    std::vector<double> p(M, 0.0);
    auto add = [&](const CMatrix &A, double scale) {
        for (std::size_t m = 0; m < M; ++m)
            for (std::size_t k = 0; k < K; ++k)
                p[m] += scale * xi[k] * std::norm(A(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k)));
    };
    switch (W.form)
    {
    case PrecodingMatrix::Form::Flat:
        add(W.W[0], 1.0);
        break;
    case PrecodingMatrix::Form::Taps:
        // Parseval: the mean over theta of |W[theta]|^2 is the tap energy
        for (const auto &t : W.taps)
            add(t, 1.0);
        break;
    case PrecodingMatrix::Form::Subcarrier:
        for (const auto &w : W.W)
            add(w, 1.0 / static_cast<double>(W.W.size()));
        break;
    }
    return p;
}

double max_power_ratio(const std::vector<double> &p)
{
    const double mean = std::accumulate(p.begin(), p.end(), 0.0) / static_cast<double>(p.size());
    if (!(mean > 0.0))
        throw InputError("max_power_ratio: zero transmit power");
    return *std::max_element(p.begin(), p.end()) / mean;
}

double avg_max_power_deviation_db(const std::function<PrecodingMatrix(std::size_t)> &realization,
                                  const std::vector<double> &xi, std::size_t realizations)
{
    if (realizations < 100)
        throw InputError("avg_max_power_deviation: at least 100 realizations required");
    double acc = 0.0;
    for (std::size_t r = 0; r < realizations; ++r)
        acc += max_power_ratio(per_antenna_power(realization(r), xi));
    return 10.0 * std::log10(acc / static_cast<double>(realizations));
}

std::vector<ToneTerm> two_tone_predict(int nu1, int nu2, double phi1, double phi2)
{
    if (nu1 == nu2)
        throw InputError("two_tone_predict: the two subcarriers must differ");
    return {{nu1, phi1, 3}, {nu2, phi2, 3}, {2 * nu1 - nu2, 2.0 * phi1 - phi2, 1}, {2 * nu2 - nu1, 2.0 * phi2 - phi1, 1}};
}

double wrap_phase(double phi)
{
    double w = std::fmod(phi, 2.0 * kPi);
    if (w < 0.0)
        w += 2.0 * kPi;
    return w;
}

double phase_to_angle(double phi, double spacing_wavelengths)
{
    double w = wrap_phase(phi);
    if (w > kPi)
        w -= 2.0 * kPi;
    const double s = -w / (2.0 * kPi * spacing_wavelengths);
    if (std::abs(s) > 1.0 + 1e-12)
        return std::numeric_limits<double>::quiet_NaN();
    return std::asin(std::clamp(s, -1.0, 1.0));
}

namespace
{
long long phase_key(double phi)
{
    double w = wrap_phase(phi);
    long long k = std::llround(w * 1e9);
    if (k >= std::llround(2.0 * kPi * 1e9))
        k = 0;
    return k;
}
} // namespace

std::vector<std::pair<double, std::size_t>> DirectionSet::phases() const
{
    std::vector<std::pair<double, std::size_t>> out;
    for (const auto &[k, n] : counts)
        out.emplace_back(static_cast<double>(k) * 1e-9, n);
    return out;
}

std::size_t DirectionSet::total() const
{
    std::size_t t = 0;
    for (const auto &kv : counts)
        t += kv.second;
    return t;
}

bool DirectionSet::contains(double phase) const
{
    return counts.count(phase_key(phase)) > 0;
}

DirectionSet ofdm_direction_sets(const std::vector<std::vector<std::size_t>> &schedule, int target,
                                 const std::vector<double> &user_phase)
{
    const int N = static_cast<int>(schedule.size());
    if (target < 0 || target >= N)
        throw InputError("ofdm_direction_sets: target subcarrier outside 0..N-1");
    for (const auto &s : schedule)
        for (std::size_t k : s)
            if (k >= user_phase.size())
                throw InputError("ofdm_direction_sets: schedule names an unknown user");
    DirectionSet d;
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
        {
            const int c = a + b - target;
            if (c < 0 || c >= N)
                continue;
            for (std::size_t k : schedule[a])
                for (std::size_t kp : schedule[b])
                    for (std::size_t kpp : schedule[c])
                        ++d.counts[phase_key(user_phase[k] + user_phase[kp] - user_phase[kpp])];
        }
    return d;
}

RadiationPattern radiation_pattern(const DistortionDecomposition &D, double f, const std::vector<double> &angles_deg,
                                   const ArrayGeometry &geometry)
{
    if (geometry.size() != D.antennas())
        throw InputError("radiation_pattern: geometry size differs from the array");
    const auto &g = D.grid();
    if (f < g.f_min() - 0.5 * g.df() || f > g.f_max() + 0.5 * g.df())
        throw InputError("radiation_pattern: frequency outside the grid");
    const std::size_t i = g.nearest(f);
    RadiationPattern p;
    p.f = g.at(i);
    p.angles_deg = angles_deg;
    p.orders = D.orders;
    const CMatrix Su = D.Suu.at(i), Sd = D.Sdd.at(i);
    std::vector<CMatrix> So;
    for (const auto &t : D.order_terms)
        So.push_back(t.at(i));
    p.per_order.assign(So.size(), {});
    for (double a : angles_deg)
    {
        // Unit-modulus probe: beta |h|^2 = M
        const CVector v = steering_vector(geometry, a * kPi / 180.0).conjugate();
        const double lin = std::max(0.0, v.dot(Su * v).real());
        const double dist = std::max(0.0, v.dot(Sd * v).real());
        p.linear.push_back(lin);
        p.distortion.push_back(dist);
        p.total.push_back(lin + dist);
        for (std::size_t o = 0; o < So.size(); ++o)
            p.per_order[o].push_back(std::max(0.0, v.dot(So[o] * v).real()));
    }
    return p;
}

std::vector<double> angle_grid(double step_deg)
{
    if (!(step_deg > 0.0) || step_deg > 90.0)
        throw InputError("angle grid: step must be in (0, 90] degrees");
    std::vector<double> a;
    const long n = std::lround(180.0 / step_deg);
    for (long i = 0; i <= n; ++i)
        a.push_back(std::min(90.0, -90.0 + i * step_deg));
    return a;
}

std::vector<double> eigen_spectrum(const SpectralMatrix &S, double f)
{
    const auto e = hermitian_eig(S.at(S.grid().nearest(f)));
    return {e.values.data(), e.values.data() + e.values.size()};
}

} // namespace arraydist
