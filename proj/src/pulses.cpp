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

#include "arraydist/pulses.hpp"

#include <cmath>

namespace arraydist
{

double raised_cosine_spectrum(double f, double T, double rolloff)
{
    const double af = std::abs(f);
    const double f1 = (1.0 - rolloff) / (2.0 * T), f2 = (1.0 + rolloff) / (2.0 * T);
    if (af <= f1)
        return T;
    if (af >= f2)
        return 0.0;
    return 0.5 * T * (1.0 + std::cos(kPi * T / rolloff * (af - f1)));
}

PulseBank PulseBank::single_carrier(double T, double rolloff)
{
    if (!(T > 0.0))
        throw InputError("pulses: symbol period must be positive");
    if (!(rolloff > 0.0) || rolloff > 1.0)
        throw InputError("pulses: roll-off must be in (0, 1]");
    PulseBank p;
    p.family = PulseFamily::RootRaisedCosine;
    p.N = 1;
    p.T = T;
    p.f0 = 1.0 / T;
    p.rolloff = rolloff;
    p.B = (1.0 + rolloff) / T;
    p.subcarriers = {0};
    return p;
}

PulseBank PulseBank::ofdm(int N, double T, double excess_bandwidth, bool lowpass)
{
    if (N < 1)
        throw InputError("pulses: subcarrier count must be >= 1");
    if (!(T > 0.0))
        throw InputError("pulses: symbol period must be positive");
    if (!(excess_bandwidth >= 1.0))
        throw InputError("pulses: excess bandwidth factor must be >= 1");
    PulseBank p;
    p.family = PulseFamily::RectOfdm;
    p.N = N;
    p.T = T;
    p.f0 = 1.0 / T;
    p.rolloff = 0.0;
    p.B = excess_bandwidth * N * p.f0;
    p.lowpass = lowpass;
    for (int nu = -N / 2; nu < N - N / 2; ++nu)
        p.subcarriers.push_back(nu);
    return p;
}

std::size_t PulseBank::index_of(int nu) const
{
    for (std::size_t i = 0; i < subcarriers.size(); ++i)
        if (subcarriers[i] == nu)
            return i;
    throw InputError("pulses: subcarrier " + std::to_string(nu) + " not in bank");
}

cplx PulseBank::amplitude(std::size_t idx, double f) const
{
    double z = 1.0;
    if (lowpass)
    {
        double e = std::abs(f) - 0.5 * B;
        if (e > 1e-12 * B)
            return 0.0;
        if (std::abs(e) <= 1e-12 * B)
            z = std::sqrt(0.5);
    }
    if (family == PulseFamily::RootRaisedCosine)
        return z * std::sqrt(raised_cosine_spectrum(f, T, rolloff));
    // Rectangle on [0, T): sqrt(T) sinc((f - nu f0) T) e^{-j pi (f - nu f0) T}
    const double u = (f - subcarrier_frequency(idx)) * T;
    const double s = std::abs(u) < 1e-12 ? 1.0 : std::sin(kPi * u) / (kPi * u);
    return z * std::sqrt(T) * s * std::polar(1.0, -kPi * u);
}

double PulseBank::energy(std::size_t idx, double f) const
{
    return std::norm(amplitude(idx, f));
}

std::vector<double> PulseBank::energy_on_grid(std::size_t idx, const FrequencyGrid &grid) const
{
    std::vector<double> e(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        e[i] = energy(idx, grid.at(i));
    return e;
}

double PulseBank::raised_cosine_time(double t) const
{
    const double x = t / T;
    const double s = std::abs(x) < 1e-12 ? 1.0 : std::sin(kPi * x) / (kPi * x);
    const double d = 1.0 - 4.0 * rolloff * rolloff * x * x;
    if (std::abs(d) < 1e-10)
        return kPi / 4.0 * s; // limit at t = +-T/(2 rolloff)
    return s * std::cos(kPi * rolloff * x) / d;
}

} // namespace arraydist
