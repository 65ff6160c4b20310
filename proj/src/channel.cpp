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

#include "arraydist/channel.hpp"

#include "arraydist/fft.hpp"
#include "arraydist/random.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace arraydist
{

double ArrayGeometry::uniform_spacing() const
{
    if (offsets_m.size() < 2)
        return 0.0;
    const double d = offsets_m[1] - offsets_m[0];
    for (std::size_t m = 0; m < offsets_m.size(); ++m)
        if (std::abs(offsets_m[m] - m * d - offsets_m[0]) > 1e-9 * std::abs(d) * (1.0 + m))
            return 0.0;
    return d;
}

ArrayGeometry ArrayGeometry::uniform_linear(std::size_t M, double spacing_wavelengths, double carrier_hz)
{
    if (M == 0)
        throw InputError("array: at least one antenna required");
    if (!(carrier_hz > 0.0))
        throw InputError("array: carrier frequency must be positive");
    ArrayGeometry g;
    g.carrier_hz = carrier_hz;
    const double d = spacing_wavelengths * g.wavelength();
    for (std::size_t m = 0; m < M; ++m)
        g.offsets_m.push_back(m * d);
    return g;
}

double los_phase(double theta_rad, double spacing_m, double wavelength_m)
{
    return -2.0 * kPi * std::sin(theta_rad) * spacing_m / wavelength_m;
}

CVector steering_vector(const ArrayGeometry &g, double theta_rad)
{
    CVector h(g.size());
    for (std::size_t m = 0; m < g.size(); ++m)
        h(m) = std::polar(1.0, los_phase(theta_rad, g.offsets_m[m], g.wavelength()));
    return h;
}

CVector ChannelModel::user_response(std::size_t k, double f) const
{
    const std::size_t M = antennas();
    const auto &P = paths.at(k);
    if (narrowband)
    {
        CVector h = CVector::Zero(M);
        for (const auto &p : P)
            h += steering_vector(geometry, p.angle_rad);
        return h / std::sqrt(static_cast<double>(P.size()));
    }
    const double fa = geometry.carrier_hz + f;
    const double d = geometry.uniform_spacing();
    CVector h = CVector::Zero(M);
    for (const auto &p : P)
    {
        const double s = std::sin(p.angle_rad) / kSpeedOfLight;
        const cplx base = std::polar(1.0, -2.0 * kPi * fa * (p.delay_s + geometry.offsets_m[0] * s));
        if (d != 0.0)
        {
            const cplx step = std::polar(1.0, -2.0 * kPi * fa * d * s);
            cplx z = base;
            for (std::size_t m = 0; m < M; ++m)
            {
                h(m) += z;
                z *= step;
            }
        }
        else
            for (std::size_t m = 0; m < M; ++m)
                h(m) += std::polar(1.0, -2.0 * kPi * fa * (p.delay_s + geometry.offsets_m[m] * s));
    }
    return h / std::sqrt(static_cast<double>(P.size()));
}

CMatrix ChannelModel::response(double f) const
{
    CMatrix H(users(), antennas());
    for (std::size_t k = 0; k < users(); ++k)
        H.row(k) = user_response(k, f).transpose();
    return H;
}

ChannelModel multipath_model(std::uint64_t seed, std::size_t K, std::size_t V, double sigma_tau, const ArrayGeometry &g)
{
    if (V == 0)
        throw InputError("multipath: number of paths V must be >= 1");
    if (!(sigma_tau >= 0.0))
        throw InputError("multipath: delay spread must be >= 0");
    if (K == 0)
        throw InputError("multipath: at least one user required");
    ChannelModel ch;
    ch.geometry = g;
    ch.paths.resize(K);
    ch.beta.assign(K, 1.0);
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t v = 0; v < V; ++v)
        {
            // one substream per (user, path): realizations do not depend on evaluation order
            Rng rng(substream(seed, 0x636861, k, v));
            Path p;
            p.delay_s = rng.uniform(0.0, sigma_tau);
            p.angle_rad = rng.uniform(-0.5 * kPi, 0.5 * kPi);
            ch.paths[k].push_back(p);
        }
    return ch;
}

ChannelModel los_model(const std::vector<double> &angles_rad, const ArrayGeometry &g, bool narrowband, std::uint64_t seed,
                       double max_delay_s)
{
    ChannelModel ch;
    ch.geometry = g;
    ch.narrowband = narrowband;
    for (std::size_t k = 0; k < angles_rad.size(); ++k)
    {
        if (std::abs(angles_rad[k]) > 0.5 * kPi + 1e-12)
            throw InputError("los: angles must lie in [-pi/2, pi/2]");
        Path p;
        p.angle_rad = angles_rad[k];
        if (!narrowband)
        {
            Rng rng(substream(seed, 0x6c6f73, k));
            p.delay_s = rng.uniform(0.0, max_delay_s);
        }
        ch.paths.push_back({p});
    }
    ch.beta.assign(angles_rad.size(), 1.0);
    return ch;
}

ChannelFrequencyResponse sample_channel(const ChannelModel &ch, const FrequencyGrid &grid)
{
    ChannelFrequencyResponse r;
    r.grid = grid;
    r.beta = ch.beta;
    r.H.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        r.H[i] = ch.response(grid.at(i));
    return r;
}

ChannelFrequencyResponse gen_multipath(std::uint64_t seed, std::size_t M, std::size_t K, std::size_t V, double sigma_tau,
                                       const ArrayGeometry &g, const FrequencyGrid &grid)
{
    if (g.size() != M)
        throw InputError("multipath: geometry has " + std::to_string(g.size()) + " elements, M = " + std::to_string(M));
    return sample_channel(multipath_model(seed, K, V, sigma_tau, g), grid);
}

ChannelFrequencyResponse gen_los(const std::vector<double> &angles_rad, const ArrayGeometry &g, const FrequencyGrid &grid,
                                 bool narrowband, std::uint64_t seed)
{
    return sample_channel(los_model(angles_rad, g, narrowband, seed), grid);
}

CMatrix DiscreteChannel::response(double theta) const
{
    if (taps.empty())
        throw InputError("discrete channel: no taps (OFDM channels use subcarrier gains)");
    CMatrix h = CMatrix::Zero(taps[0].rows(), taps[0].cols());
    for (std::size_t l = 0; l < taps.size(); ++l)
        h += taps[l] * std::polar(1.0, -2.0 * kPi * theta * (first_tap + static_cast<int>(l)));
    return h;
}

CMatrix DiscreteChannel::cross_subcarrier_gain(std::size_t idx, std::size_t idx2) const
{
    const CMatrix &g = subcarrier_gains.at(idx);
    return idx == idx2 ? g : CMatrix::Zero(g.rows(), g.cols());
}

std::size_t DiscreteChannel::significant_taps(std::size_t k, std::size_t m, double rel) const
{
    double peak = 0.0;
    for (const auto &t : taps)
        peak = std::max(peak, std::norm(t(k, m)));
    std::size_t n = 0;
    for (const auto &t : taps)
        if (std::norm(t(k, m)) >= rel * peak)
            ++n;
    return n;
}

CMatrix folded_response(const ChannelModel &ch, const PulseBank &pulses, double theta)
{
    if (pulses.family != PulseFamily::RootRaisedCosine)
        throw InputError("folded_response: single-carrier pulses required");
    const double T = pulses.T;
    const double f = theta / T;
    const double half = 0.5 * pulses.B;
    CMatrix h = CMatrix::Zero(ch.users(), ch.antennas());
    const int n_lo = static_cast<int>(std::floor((f - half) * T)) - 1;
    const int n_hi = static_cast<int>(std::ceil((f + half) * T)) + 1;
    for (int n = n_lo; n <= n_hi; ++n)
    {
        const double fn = f - n / T;
        const double e = pulses.energy(0, fn);
        if (e > 0.0)
            h += (e / T) * ch.response(fn);
    }
    return h;
}

std::size_t required_theta_points(const ChannelModel &ch, const PulseBank &pulses)
{
    double span = 0.0;
    double aperture = 0.0;
    for (double o : ch.geometry.offsets_m)
        aperture = std::max(aperture, std::abs(o));
    for (const auto &user : ch.paths)
        for (const auto &p : user)
            span = std::max(span, p.delay_s);
    if (ch.narrowband)
        span = aperture = 0.0;
    const double taps = (span + aperture / kSpeedOfLight) / pulses.T;
    // Raised-cosine tails decay as l^-3; 32 symbols of margin on each side
    return static_cast<std::size_t>(std::ceil(taps)) + 64;
}

DiscreteChannel discretize(const ChannelModel &ch, const PulseBank &pulses, std::size_t n_theta)
{
    DiscreteChannel d;
    if (pulses.family == PulseFamily::RectOfdm)
    {
        for (std::size_t i = 0; i < pulses.count(); ++i)
            d.subcarrier_gains.push_back(ch.response(pulses.subcarrier_frequency(i)));
        return d;
    }

    const std::size_t need = required_theta_points(ch, pulses);
    if (n_theta == 0)
        n_theta = fft_good_size(std::max<std::size_t>(128, 2 * need));
    else if (n_theta < need)
        throw InputError("discretize: theta grid of " + std::to_string(n_theta) +
                         " points is too coarse to resolve the delay spread (need " + std::to_string(need) + ")");

    const std::size_t K = ch.users(), M = ch.antennas(), n = n_theta;
    d.n_theta = n;
    std::vector<CMatrix> hq(n);
    for (std::size_t q = 0; q < n; ++q)
        hq[q] = folded_response(ch, pulses, static_cast<double>(q) / n);

    // Inverse DFT entrywise: h[l] = (1/n) sum_q h(theta_q) e^{j 2 pi q l / n}
    FftPlan inv(n, FftPlan::Direction::Inverse);
    std::vector<CMatrix> all(n, CMatrix::Zero(K, M));
    std::vector<cplx> buf(n);
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t m = 0; m < M; ++m)
        {
            for (std::size_t q = 0; q < n; ++q)
                buf[q] = hq[q](k, m);
            inv.execute(buf);
            for (std::size_t l = 0; l < n; ++l)
                all[l](k, m) = buf[l] / static_cast<double>(n);
        }

    // Order taps from -n/2 .. n/2-1 and keep the window holding non-negligible energy
    const long half = static_cast<long>(n / 2);
    std::vector<double> energy(n);
    double emax = 0.0;
    for (long l = -half; l < static_cast<long>(n) - half; ++l)
    {
        const auto &t = all[static_cast<std::size_t>((l + static_cast<long>(n)) % static_cast<long>(n))];
        energy[static_cast<std::size_t>(l + half)] = t.squaredNorm();
        emax = std::max(emax, t.squaredNorm());
    }
    long lo = static_cast<long>(n), hi = -1;
    for (long i = 0; i < static_cast<long>(n); ++i)
        if (energy[static_cast<std::size_t>(i)] >= 1e-14 * emax)
        {
            lo = std::min(lo, i);
            hi = std::max(hi, i);
        }
    d.first_tap = static_cast<int>(lo - half);
    for (long i = lo; i <= hi; ++i)
    {
        long l = i - half;
        d.taps.push_back(all[static_cast<std::size_t>((l + static_cast<long>(n)) % static_cast<long>(n))]);
    }
    return d;
}

void write_channel(std::ostream &out, const ChannelModel &ch)
{
    out << "# arraydist channel, one 'path <user> <delay_s> <angle_rad>' record per path\n";
    out << "format = 1\n" << std::setprecision(17);
    out << "carrier_hz = " << ch.geometry.carrier_hz << "\n";
    out << "narrowband = " << (ch.narrowband ? 1 : 0) << "\n";
    out << "offsets_m =";
    for (double o : ch.geometry.offsets_m)
        out << ' ' << o;
    out << "\nbeta =";
    for (double b : ch.beta)
        out << ' ' << b;
    out << '\n';
    for (std::size_t k = 0; k < ch.paths.size(); ++k)
        for (const auto &p : ch.paths[k])
            out << "path " << k << ' ' << p.delay_s << ' ' << p.angle_rad << '\n';
}

ChannelModel read_channel(std::istream &in)
{
    ChannelModel ch;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos)
            line.erase(h);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key))
            continue;
        auto fail = [&](const std::string &why) {
            throw InputError("channel file line " + std::to_string(lineno) + ": " + why);
        };
        if (key == "path")
        {
            std::size_t k;
            Path p;
            if (!(ls >> k >> p.delay_s >> p.angle_rad))
                fail("path record needs user, delay and angle");
            if (ch.paths.size() <= k)
                ch.paths.resize(k + 1);
            ch.paths[k].push_back(p);
            continue;
        }
        std::string eq;
        if (!(ls >> eq) || eq != "=")
            fail("expected 'key = value'");
        if (key == "format")
        {
            int v = 0;
            if (!(ls >> v) || v != 1)
                fail("unsupported format version");
        }
        else if (key == "carrier_hz")
            ls >> ch.geometry.carrier_hz;
        else if (key == "narrowband")
        {
            int v = 0;
            ls >> v;
            ch.narrowband = v != 0;
        }
        else if (key == "offsets_m")
        {
            double o;
            while (ls >> o)
                ch.geometry.offsets_m.push_back(o);
        }
        else if (key == "beta")
        {
            double b;
            while (ls >> b)
                ch.beta.push_back(b);
        }
        else
            fail("unknown key '" + key + "'");
    }
    if (ch.geometry.offsets_m.empty() || ch.paths.empty())
        throw InputError("channel file: offsets and at least one path required");
    for (std::size_t k = 0; k < ch.paths.size(); ++k)
        if (ch.paths[k].empty())
            throw InputError("channel file: user " + std::to_string(k) + " has no paths");
    if (ch.beta.empty())
        ch.beta.assign(ch.paths.size(), 1.0);
    if (ch.beta.size() != ch.paths.size())
        throw InputError("channel file: beta count differs from user count");
    return ch;
}

} // namespace arraydist
