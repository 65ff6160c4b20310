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

#include "arraydist/metrics.hpp"
#include "arraydist/scenario.hpp"

#include <string>
#include <vector>

namespace arraydist
{

// Everything derived from a scenario before amplification
struct Setup
{
    Scenario scenario;
    ArrayGeometry geometry;
    ChannelModel channel;
    PulseBank pulses;
    FrequencyGrid grid;
    DiscreteChannel discrete;
    PrecoderSpec precoder;
    PrecodingMatrix W;
    PowerAllocation xi;
    Schedule schedule;
    MemoryPolynomialPA pa;
    int order = 3;
    double drive = 0.0; // mean per-antenna input power
    SpectralMatrix Sxx;
    TxConfig tx;

    double B() const { return pulses.B; }
    bool line_of_sight() const { return scenario.channel.type == "los"; }
};

Setup build_setup(const Scenario &s);
DistortionDecomposition analyze(const Setup &setup);

struct DirectionSummary
{
    DirectionPrediction prediction;
    double L = 1.0;               // significant taps used
    std::size_t numerical_rank = 0; // rank of S_dd^(3) at the evaluation frequency
    double f = 0.0;
};

struct RunMetrics
{
    double aclr_db = 0.0;                 // transmitted, all antennas
    std::vector<double> user_aclr_db;     // received at each served user
    double array_aclr_db = 0.0;           // at the worst adjacent-band direction
    double array_aclr_angle_deg = 0.0;
    std::vector<double> gmax_f_over_b;    // G_max evaluation points
    std::vector<double> gmax_db;
    double max_power_ratio_db = 0.0;      // this realization
    DirectionSummary directions;
    std::vector<double> input_power;      // per antenna
    std::vector<double> order_power;      // mean per-antenna power of each distortion order
    double psd_floor = 0.0;
};

RunMetrics compute_metrics(const Setup &setup, const DistortionDecomposition &D);

struct EigenResult
{
    double f = 0.0;
    std::vector<double> values; // descending, S_dd
    std::size_t rank = 0;
    std::vector<double> values3; // third-order term alone (empty below order 3)
    std::size_t rank3 = 0;
    double gmax_db = 0.0;
};

std::vector<EigenResult> eigen_analysis(const Setup &setup, const DistortionDecomposition &D);

std::vector<RadiationPattern> patterns(const Setup &setup, const DistortionDecomposition &D,
                                       const std::vector<double> &frequencies);

// Adjacent-band distortion CCDF over random receiver locations
CcdfTable ccdf_analysis(const Setup &setup, const DistortionDecomposition &D);

struct TwoToneLine
{
    int subcarrier = 0;
    double f = 0.0;
    int weight = 0;
    double predicted_deg = 0.0; // NaN when no real angle exists
    double peak_deg = 0.0;      // strongest distortion direction at this frequency
    double error_deg = 0.0;
    bool intermodulation = false;
};

struct TwoToneResult
{
    int nu1 = 0, nu2 = 0;
    double theta1_deg = 0.0, theta2_deg = 0.0;
    std::vector<TwoToneLine> lines;
    std::vector<RadiationPattern> patterns; // one per line
};

// Requires an OFDM LOS scenario with exactly two scheduled subcarriers, one user each
TwoToneResult two_tone_analysis(const Setup &setup, const DistortionDecomposition &D);

ValidationReport mc_validation(const Setup &setup, const DistortionDecomposition &D);

} // namespace arraydist
