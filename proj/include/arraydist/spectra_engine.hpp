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
#include "arraydist/hermite_pa.hpp"
#include "arraydist/spectral_matrix.hpp"

#include <string>
#include <vector>

namespace arraydist
{

struct EngineOptions
{
    ConvOptions conv;
    // Grid points at which every component is checked for positive semidefiniteness (0 disables)
    std::size_t psd_check_points = 8;
    // Largest dimension for which the check runs
    std::size_t psd_check_max_dim = 64;
};

// Order-w modulation term: ((w+1)/2)! ((w-1)/2)! times the entrywise convolution of (w+1)/2 copies of S
// and (w-1)/2 copies of conj_reflect(S)
SpectralMatrix modulation_term(const SpectralMatrix &Sxx, int order, const ConvOptions &opt = {});

// All odd orders 1, 3, .., max_order built by one convolution chain
std::vector<SpectralMatrix> modulation_terms(const SpectralMatrix &Sxx, int max_order, const ConvOptions &opt = {});

// Throws when the grid cannot hold the order-w support of S
void check_grid_extent(const SpectralMatrix &Sxx, int order);

struct DistortionDecomposition
{
    SpectralMatrix Sxx;
    SpectralMatrix Suu;
    std::vector<int> orders;                // 3, 5, ..
    std::vector<SpectralMatrix> order_terms; // S_dd^(w) in the same order
    SpectralMatrix Sdd;
    SpectralMatrix Syy;
    std::vector<double> sigma; // per-antenna input rms used for the Hermite kernels
    double psd_floor = 0.0;    // most negative eigenvalue / largest seen in the PSD check

    const FrequencyGrid &grid() const { return Sxx.grid(); }
    std::size_t antennas() const { return Sxx.dim(); }
    const SpectralMatrix &order_term(int order) const;
};

// Per-antenna rms sqrt(integral of [S]_mm)
std::vector<double> antenna_rms(const SpectralMatrix &Sxx);

DistortionDecomposition amplified_psd(const SpectralMatrix &Sxx, const HermiteKernels &kernels,
                                      const EngineOptions &opt = {});
// Kernels fitted to the per-antenna input level of Sxx
DistortionDecomposition amplified_psd(const SpectralMatrix &Sxx, const MemoryPolynomialPA &pa,
                                      const EngineOptions &opt = {});

// Mean per-antenna input power for an average back-off (dB) from the one-dB compression point
double drive_power(const MemoryPolynomialPA &pa, double backoff_db);
// Sxx rescaled so the mean per-antenna power equals target
SpectralMatrix scale_to_mean_power(const SpectralMatrix &Sxx, double target);

// tr S_yy(f)
ScalarSpectrum total_tx_psd(const SpectralMatrix &Syy);

struct ReceiverLocation
{
    std::vector<CVector> h; // channel row per grid point, or a single frequency-flat row
    double beta = 1.0;
    std::string label;

    const CVector &at(std::size_t i) const { return h.size() == 1 ? h[0] : h[i]; }
    double norm2(std::size_t i = 0) const { return at(i).squaredNorm(); }

    // Narrowband LOS probe with unit-modulus entries, so beta |h|^2 = M
    static ReceiverLocation line_of_sight(const ArrayGeometry &g, double theta_rad, std::string label = {});
    static ReceiverLocation from_channel(const ChannelModel &ch, std::size_t user, const FrequencyGrid &grid,
                                         std::string label = {});
    // Same direction, beta rescaled so beta |h(f)|^2 averages to M over the grid
    ReceiverLocation normalized(std::size_t M) const;
};

struct ReceivedSpectra
{
    ScalarSpectrum total;
    ScalarSpectrum linear;
    ScalarSpectrum distortion;
    std::vector<ScalarSpectrum> per_order;
};

// beta h^T S(f) conj(h) for every component
ReceivedSpectra received_psd(const DistortionDecomposition &D, const ReceiverLocation &loc);

// Received PSD of one matrix
ScalarSpectrum received_component(const SpectralMatrix &S, const ReceiverLocation &loc);

} // namespace arraydist
