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

#include "arraydist/pulses.hpp"
#include "arraydist/spectral_matrix.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace arraydist
{

constexpr double kSpeedOfLight = 299792458.0;

struct ArrayGeometry
{
    std::vector<double> offsets_m; // element offsets along the array axis, first is 0
    double carrier_hz = 3.0e9;

    std::size_t size() const { return offsets_m.size(); }
    double wavelength() const { return kSpeedOfLight / carrier_hz; }
    // Equal spacing (in wavelengths); nonzero return is the spacing in meters
    double uniform_spacing() const;

    static ArrayGeometry uniform_linear(std::size_t M, double spacing_wavelengths, double carrier_hz);
};

// Narrowband phase increment between adjacent elements: -2 pi sin(theta) spacing / lambda
double los_phase(double theta_rad, double spacing_m, double wavelength_m);

// Narrowband LOS channel row h_m = exp(-j 2 pi sin(theta) Delta_m / lambda)
CVector steering_vector(const ArrayGeometry &g, double theta_rad);

struct Path
{
    double delay_s = 0.0;
    double angle_rad = 0.0;
};

// Continuous channel description: planar-wave multipath or narrowband line of sight
struct ChannelModel
{
    ArrayGeometry geometry;
    std::vector<std::vector<Path>> paths; // per user
    bool narrowband = false;              // LOS, frequency-flat steering vectors
    std::vector<double> beta;             // large-scale gain per user

    std::size_t users() const { return paths.size(); }
    std::size_t antennas() const { return geometry.size(); }

    // K x M transfer matrix at baseband frequency f
    CMatrix response(double f) const;
    CVector user_response(std::size_t k, double f) const;
};

ChannelModel multipath_model(std::uint64_t seed, std::size_t K, std::size_t V, double sigma_tau, const ArrayGeometry &g);
// Wideband LOS draws one delay per user uniformly on [0, max_delay_s]
ChannelModel los_model(const std::vector<double> &angles_rad, const ArrayGeometry &g, bool narrowband,
                       std::uint64_t seed = 0, double max_delay_s = 0.5e-9);

struct ChannelFrequencyResponse
{
    FrequencyGrid grid;
    std::vector<CMatrix> H; // K x M per grid point
    std::vector<double> beta;
};

ChannelFrequencyResponse sample_channel(const ChannelModel &ch, const FrequencyGrid &grid);
ChannelFrequencyResponse gen_multipath(std::uint64_t seed, std::size_t M, std::size_t K, std::size_t V, double sigma_tau,
                                       const ArrayGeometry &g, const FrequencyGrid &grid);
ChannelFrequencyResponse gen_los(const std::vector<double> &angles_rad, const ArrayGeometry &g, const FrequencyGrid &grid,
                                 bool narrowband, std::uint64_t seed = 0);

// Symbol-spaced equivalent channel seen through the transmit pulses
struct DiscreteChannel
{
    // Single carrier: h[l] = ((p * h * p^*(-t))(lT)), l = first_tap .. first_tap + taps.size() - 1, each K x M
    int first_tap = 0;
    std::vector<CMatrix> taps;
    std::size_t n_theta = 0;
    // OFDM (cyclic prefix): gain per subcarrier index of the pulse bank, K x M
    std::vector<CMatrix> subcarrier_gains;

    // sum_l h[l] exp(-j 2 pi theta l)
    CMatrix response(double theta) const;
    // With a cyclic prefix the inter-subcarrier gains vanish by construction
    CMatrix cross_subcarrier_gain(std::size_t idx, std::size_t idx2) const;
    // Taps of user k, antenna m with energy >= rel * strongest tap
    std::size_t significant_taps(std::size_t k, std::size_t m, double rel = 0.01) const;
};

// Folded symbol-rate response (1/T) sum_n |P(f - n/T)|^2 h(f - n/T) at f = theta/T
CMatrix folded_response(const ChannelModel &ch, const PulseBank &pulses, double theta);

// n_theta = 0 chooses a size that resolves the delay spread
DiscreteChannel discretize(const ChannelModel &ch, const PulseBank &pulses, std::size_t n_theta = 0);
std::size_t required_theta_points(const ChannelModel &ch, const PulseBank &pulses);

// Plain-text per-path records
void write_channel(std::ostream &out, const ChannelModel &ch);
ChannelModel read_channel(std::istream &in);

} // namespace arraydist
