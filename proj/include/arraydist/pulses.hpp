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

#pragma once

#include "arraydist/grid.hpp"

#include <vector>

namespace arraydist
{

enum class PulseFamily
{
    RootRaisedCosine, // single carrier
    RectOfdm          // rectangular OFDM pulses, f0 = 1/T
};

// Unit-energy transmit pulses p_nu. Frequencies are baseband (carrier at 0).
struct PulseBank
{
    PulseFamily family = PulseFamily::RootRaisedCosine;
    int N = 1;
    double T = 1.0;        // symbol period
    double f0 = 0.0;       // subcarrier spacing (OFDM)
    double rolloff = 0.22; // root-raised-cosine roll-off
    double B = 0.0;        // occupied bandwidth
    bool lowpass = false;  // ideal low-pass of width B applied to every pulse
    std::vector<int> subcarriers;

    static PulseBank single_carrier(double T, double rolloff);
    // B = excess_bandwidth * N * f0, subcarriers nu = -N/2 .. N/2 - 1
    static PulseBank ofdm(int N, double T, double excess_bandwidth, bool lowpass);

    std::size_t count() const { return subcarriers.size(); }
    double subcarrier_frequency(std::size_t idx) const { return subcarriers[idx] * f0; }
    std::size_t index_of(int nu) const;

    // P_nu(f), including the low-pass filter
    cplx amplitude(std::size_t idx, double f) const;
    // |P_nu(f)|^2; half weight exactly on a filter edge
    double energy(std::size_t idx, double f) const;
    std::vector<double> energy_on_grid(std::size_t idx, const FrequencyGrid &grid) const;

    // Raised-cosine time pulse (p * p^*(-t))(t) of the single-carrier family, g(0) = 1
    double raised_cosine_time(double t) const;
};

// |P(f)|^2 of a unit-energy root-raised-cosine pulse
double raised_cosine_spectrum(double f, double T, double rolloff);

} // namespace arraydist
