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

#include "arraydist/precoder.hpp"
#include "arraydist/spectra_engine.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace arraydist
{

// 10 log10(M rho(S_dd) / S_tx) in dBi
double g_max_db(const CMatrix &Sdd, double Stx, std::size_t M);

// Distortion directivity at grid index i: total taken as tr S_dd(f). NaN where S_dd vanishes.
double distortion_gmax_db(const SpectralMatrix &Sdd, std::size_t i);

// |P_v(f)|^2 of a victim receive filter; empty means all-pass
using VictimFilter = std::function<double(double)>;

// beta * integral over [lo, hi] of |P_v|^2 h^T S_dd conj(h)
double adjacent_distortion(const ReceiverLocation &loc, const SpectralMatrix &Sdd, double lo, double hi,
                           const VictimFilter &victim = {});

struct CcdfTable
{
    std::vector<double> value; // ascending
    std::vector<double> ccdf;  // fraction of samples >= value
};

// Empirical CCDF of D_x / (beta |h|^2) over at least 1000 locations
CcdfTable adjacent_ccdf(const std::vector<ReceiverLocation> &locations, const SpectralMatrix &Sdd, double lo, double hi,
                        const VictimFilter &victim = {});
CcdfTable make_ccdf(std::vector<double> samples);

struct BandPowers
{
    double in_band = 0.0;
    double left = 0.0;
    double right = 0.0;
};

BandPowers band_powers(const ScalarSpectrum &S, double B);

constexpr double kDbFloor = -300.0;
double to_db(double ratio);

// max(left, right) / in-band in dB, floored at -300 dB
double aclr_db(const ScalarSpectrum &Stx, double B);

// Leakage received at the reference point over the weakest user's useful power
double array_aclr_db(const std::vector<ScalarSpectrum> &useful_linear, const ScalarSpectrum &reference, double B);

struct LinkBudget
{
    double tx_power_dbm = 0.0;
    double array_gain_dbi = 0.0;
    double path_loss_db = 0.0; // negative
    double noise_dbm = 0.0;
    std::size_t users = 1;
    double aclr_db = 0.0;

    // Worst receive SNR with equal power split
    double snr_db() const;
    // Total power radiated into the adjacent band
    double radiated_adjacent_dbm() const;
};

// Integration area over the intermodulation band, valid on [B/2, 3B/2]
double integration_area(double f, double B);
// upsilon(f) = a^2 A(f) / B^2 with a = B T
double upsilon(double f, double B, double bandwidth_symbol_product);

enum class DirectionMode
{
    General,
    LineOfSight
};

struct DirectionPrediction
{
    double count = 0.0;          // predicted number of distortion directions (before capping at M)
    double capped = 0.0;         // min(M, count)
    bool omnidirectional = false;
    bool formula_in_range = true; // false when f lies outside [B/2, 3B/2] for a selective channel
    std::size_t significant_users = 0;
};

// L = number of significant channel taps; L = 1 is frequency flat
DirectionPrediction predict_directions(const std::vector<double> &xi, double L, double f, double B,
                                       double bandwidth_symbol_product, std::size_t M, DirectionMode mode);

// Per-antenna transmit power of a precoder under allocation xi (average over frequency)
std::vector<double> per_antenna_power(const PrecodingMatrix &W, const std::vector<double> &xi);
// max_m p_m / mean_m p_m
double max_power_ratio(const std::vector<double> &p);
// Mean over realizations of the max/mean ratio, in dB
double avg_max_power_deviation_db(const std::function<PrecodingMatrix(std::size_t)> &realization,
                                  const std::vector<double> &xi, std::size_t realizations);

struct ToneTerm
{
    int index;    // subcarrier index
    double phase; // beam phase
    int weight;   // multiplicity among the eight third-order terms
};

std::vector<ToneTerm> two_tone_predict(int nu1, int nu2, double phi1, double phi2);

// Beam angle of a steering phase phi = -2 pi sin(theta) d / lambda; NaN when no real angle exists
double phase_to_angle(double phi, double spacing_wavelengths);
double wrap_phase(double phi); // to [0, 2 pi)

struct DirectionSet
{
    std::map<long long, std::size_t> counts; // key: phase quantized to 1e-9 rad
    std::vector<std::pair<double, std::size_t>> phases() const;
    std::size_t total() const;
    bool contains(double phase) const;
};

// Third-order beam phases phi_k + phi_k' - phi_k'' at subcarrier `target` of schedules indexed 0..N-1
DirectionSet ofdm_direction_sets(const std::vector<std::vector<std::size_t>> &schedule, int target,
                                 const std::vector<double> &user_phase);

struct RadiationPattern
{
    double f = 0.0;
    std::vector<double> angles_deg;
    std::vector<double> linear;
    std::vector<double> distortion;
    std::vector<double> total;
    std::vector<int> orders;
    std::vector<std::vector<double>> per_order;
};

RadiationPattern radiation_pattern(const DistortionDecomposition &D, double f, const std::vector<double> &angles_deg,
                                   const ArrayGeometry &geometry);
std::vector<double> angle_grid(double step_deg);

// Descending eigenvalues of S at the grid point nearest f
std::vector<double> eigen_spectrum(const SpectralMatrix &S, double f);

} // namespace arraydist
