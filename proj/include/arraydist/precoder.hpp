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

#include "arraydist/channel.hpp"
#include "arraydist/pulses.hpp"
#include "arraydist/spectral_matrix.hpp"

#include <functional>
#include <string>
#include <vector>

namespace arraydist
{

enum class PrecoderKind
{
    MaximumRatio,
    ZeroForcing,
    RegularizedZeroForcing
};

struct PrecoderSpec
{
    PrecoderKind kind = PrecoderKind::MaximumRatio;
    double lambda = 0.0; // regularization of RZF

    static PrecoderSpec parse(const std::string &name, double lambda = 0.0);
    std::string name() const;
};

// Relative power per user, sum <= 1
struct PowerAllocation
{
    std::vector<double> xi;

    static PowerAllocation equal(std::size_t K);
    void validate(std::size_t K) const;
    double total() const;
    double max() const;
};

// Unnormalized precoder for one K x M channel: H^H, H^H (H H^H)^-1 or H^H (H H^H + lambda I)^-1
CMatrix precoder_direction(const CMatrix &H, const PrecoderSpec &spec);

// alpha with mean column energy of alpha W equal to 1/N; the mean runs over all matrices and users
double normalize_power(const std::vector<CMatrix> &directions, int N);

struct PrecodingMatrix
{
    enum class Form
    {
        Flat,      // one matrix for all frequencies
        Taps,      // single carrier, frequency selective: W[theta] = sum_l taps[l] e^{-j 2 pi theta l}
        Subcarrier // one matrix per subcarrier of the pulse bank
    };

    Form form = Form::Flat;
    double alpha = 1.0;
    std::vector<CMatrix> W; // Flat: 1 entry; Subcarrier: per bank index; all include alpha
    int first_tap = 0;
    std::vector<CMatrix> taps;

    std::size_t antennas() const;
    std::size_t users() const;
    // Precoder seen by a single-carrier symbol stream at normalized frequency theta
    CMatrix at(double theta) const;
    const CMatrix &subcarrier(std::size_t idx) const;
};

// alpha = 0 normalizes on this realization; a positive alpha (ensemble value) is applied as given
PrecodingMatrix precode(const DiscreteChannel &ch, const PrecoderSpec &spec, int N, double alpha = 0.0);

// Unnormalized directions of one realization sampled at a few frequencies (used for ensemble alpha)
std::vector<CMatrix> sample_directions(const DiscreteChannel &ch, const PrecoderSpec &spec, std::size_t points = 8);

// Ensemble alpha: mean column energy over `realizations` draws of the channel
double ensemble_alpha(const std::function<DiscreteChannel(std::size_t)> &draw, const PrecoderSpec &spec, int N,
                      std::size_t realizations);

// Users scheduled on each subcarrier of the pulse bank; empty means everyone everywhere
using Schedule = std::vector<std::vector<bool>>;

// W D W^H for one precoder matrix and allocation
CMatrix digital_psd(const CMatrix &W, const std::vector<double> &xi);

// Analog transmit cross-spectrum (1/(NT)) sum_nu |P_nu(f)|^2 W_nu D_nu W_nu^H on the grid
SpectralMatrix analog_psd(const PrecodingMatrix &W, const PowerAllocation &xi, const PulseBank &pulses,
                          const FrequencyGrid &grid, const Schedule &schedule = {});

} // namespace arraydist
