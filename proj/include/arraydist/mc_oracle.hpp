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

#include "arraydist/hermite_pa.hpp"
#include "arraydist/precoder.hpp"
#include "arraydist/spectra_engine.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace arraydist
{

enum class WindowFamily
{
    Hann,
    Hamming,
    Rectangular
};

struct WelchConfig
{
    std::size_t segment = 4096;
    double overlap = 0.5;
    WindowFamily window = WindowFamily::Hann;

    void validate() const;
    std::vector<double> coefficients() const;
};

WindowFamily parse_window(const std::string &name);
std::string window_name(WindowFamily w);

// Complex baseband samples, one row per antenna
struct SampleBlock
{
    std::vector<std::vector<cplx>> samples;
    double fs = 0.0;         // sample rate
    double psi = 0.0;        // timing offset of this block (s)
    std::size_t symbols = 0; // data symbols per stream

    std::size_t antennas() const { return samples.size(); }
    std::size_t length() const { return samples.empty() ? 0 : samples[0].size(); }
    std::vector<double> powers() const;
};

enum class Synthesis
{
    // i.i.d. Gaussian symbols through the pulse: cyclostationary, Gaussian at every instant
    Pam,
    // Independent Gaussian draw in every frequency bin with the same cross-spectrum: a stationary
    // Gaussian process (single carrier only)
    StationaryGaussian
};

Synthesis parse_synthesis(const std::string &name);
std::string synthesis_name(Synthesis s);

// Everything needed to regenerate the transmit waveform of a scenario
struct TxConfig
{
    Synthesis synthesis = Synthesis::Pam;
    PrecodingMatrix W;
    PowerAllocation xi;
    PulseBank pulses;
    Schedule schedule;
    double amplitude = 1.0; // applied to every antenna
};

// Amplitude that brings the mean per-antenna power of Sxx to target
double drive_amplitude(const SpectralMatrix &Sxx, double target);

// Sample rate used for an oversampling factor: osf/T single carrier, osf N f0 for OFDM
double sample_rate(const PulseBank &pulses, int osf);

// Precoded, pulse-shaped i.i.d. Gaussian symbols, built as one circular block so the waveform is
// exactly periodic. The timing offset is uniform on [0, T) per block. For OFDM, n_symbols counts data
// symbols per subcarrier stream summed over subcarriers (n_symbols / N OFDM symbols).
SampleBlock synthesize_tx(const TxConfig &tx, int osf, int max_order, std::uint64_t seed, std::size_t n_symbols,
                          std::size_t block = 0);

// Welch cross-spectra accumulated over blocks. Segments never straddle blocks.
class WelchAccumulator
{
  public:
    WelchAccumulator(std::size_t antennas, double fs, WelchConfig cfg);

    void add(const SampleBlock &b);
    std::size_t segments() const { return segments_; }
    // Dense estimate on the symmetric bin grid (the Nyquist bin is dropped), normalized so the
    // integral equals the sample power
    SpectralMatrix result() const;

  private:
    std::size_t M_;
    double fs_;
    WelchConfig cfg_;
    std::vector<double> win_;
    double win_power_ = 0.0;
    std::size_t segments_ = 0;
    std::vector<CMatrix> acc_; // per FFT bin
};

SpectralMatrix welch_cross_psd(const std::vector<SampleBlock> &blocks, const WelchConfig &cfg);

struct BussgangSplit
{
    SampleBlock u;
    SampleBlock d;
    std::vector<double> correlation; // |<u, d>| / (|u| |d|) per antenna, 0 when d vanishes
    std::vector<double> power_y, power_u, power_d;
    std::vector<cplx> cross; // mean of u conj(d)
    double max_correlation() const;
    // max_m |P(y) - P(u) - P(d)| / P(y)
    double additivity_error() const;
};

// u = a_1 * x with the kernels' linear part, d = y - u. Both filters run circularly over the block.
BussgangSplit bussgang_split(const SampleBlock &x, const SampleBlock &y, const HermiteKernels &kernels);

// Raw polynomial amplifier applied circularly per antenna
SampleBlock amplify(const SampleBlock &x, const MemoryPolynomialPA &pa);

struct McSettings
{
    int osf = 0; // 0 selects 2 * max order
    std::size_t blocks = 32;
    std::size_t samples = std::size_t{1} << 22; // per antenna, total over blocks
    WelchConfig welch;
    double drive_mismatch_db = 0.0; // negative control: waveform scaled against the analytic model
    double mask_dbc = -60.0;
    double band_limit = 1.5; // compare over |f| <= band_limit * B
    std::size_t average_bins = 4;
    double coherence_min = 0.5; // off-diagonal bins compared where |S_01|^2 >= c^2 S_00 S_11
};

struct ComponentDeviation
{
    std::string component; // "yy", "uu", "dd", "yy(0,1)" ..
    double max_dev_db = 0.0;
    double at_f = 0.0;
    std::size_t groups = 0; // averaged bin groups inside the mask
};

struct ValidationReport
{
    double tolerance_db = 0.5;
    std::vector<ComponentDeviation> components;
    double max_dev_db = 0.0;
    double bussgang_correlation = 0.0;
    double additivity_error = 0.0;
    double residual_power = 0.0; // P(d)/P(y) averaged over antennas
    std::size_t samples = 0;
    std::size_t segments = 0;
    int osf = 0;
    double fs = 0.0;
    bool pass = false;
    SpectralMatrix Syy, Suu, Sdd; // Welch estimates
};

// Monte-Carlo spectra of the raw amplifier output compared with the analytic decomposition D of the
// same scenario. Deviation is measured on averages of adjacent Welch bins over |f| <= band_limit B where the
// analytic PSD (smoothed by the window kernel) exceeds mask_dbc relative to the peak of S_yy.
ValidationReport validate(const DistortionDecomposition &D, const TxConfig &tx, const MemoryPolynomialPA &pa,
                          const McSettings &settings, std::uint64_t seed, double tolerance_db);

// Little-endian dump: "ADMCRAW1", uint32 antennas, uint64 samples per antenna, float64 fs, float64 psi,
// then per antenna the interleaved real/imag float64 samples
void write_samples(std::ostream &out, const SampleBlock &b);
SampleBlock read_samples(std::istream &in);

} // namespace arraydist
