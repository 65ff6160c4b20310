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

#include "arraydist/mc_oracle.hpp"

#include "arraydist/fft.hpp"
#include "arraydist/random.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>

namespace arraydist
{

void WelchConfig::validate() const
{
    if (segment < 16 || !std::has_single_bit(segment))
        throw InputError("welch: segment length must be a power of two >= 16, got " + std::to_string(segment));
    if (!(overlap >= 0.0) || overlap > 0.9)
        throw InputError("welch: overlap must be in [0, 0.9]");
}

std::vector<double> WelchConfig::coefficients() const
{
    std::vector<double> w(segment, 1.0);
    const double n = static_cast<double>(segment);
    for (std::size_t i = 0; i < segment; ++i)
    {
        const double c = std::cos(2.0 * kPi * static_cast<double>(i) / n); // periodic form
        if (window == WindowFamily::Hann)
            w[i] = 0.5 - 0.5 * c;
        else if (window == WindowFamily::Hamming)
            w[i] = 0.54 - 0.46 * c;
    }
    return w;
}

WindowFamily parse_window(const std::string &name)
{
    if (name == "hann")
        return WindowFamily::Hann;
    if (name == "hamming")
        return WindowFamily::Hamming;
    if (name == "rectangular")
        return WindowFamily::Rectangular;
    throw InputError("welch: unknown window '" + name + "' (hann, hamming, rectangular)");
}

std::string window_name(WindowFamily w)
{
    switch (w)
    {
    case WindowFamily::Hann:
        return "hann";
    case WindowFamily::Hamming:
        return "hamming";
    default:
        return "rectangular";
    }
}

Synthesis parse_synthesis(const std::string &name)
{
    if (name == "pam")
        return Synthesis::Pam;
    if (name == "stationary")
        return Synthesis::StationaryGaussian;
    throw InputError("synthesis: unknown mode '" + name + "' (pam, stationary)");
}

std::string synthesis_name(Synthesis s)
{
    return s == Synthesis::Pam ? "pam" : "stationary";
}

std::vector<double> SampleBlock::powers() const
{
    std::vector<double> p;
    for (const auto &s : samples)
    {
        double e = 0.0;
        for (const auto &v : s)
            e += std::norm(v);
        p.push_back(s.empty() ? 0.0 : e / static_cast<double>(s.size()));
    }
    return p;
}

double drive_amplitude(const SpectralMatrix &Sxx, double target)
{
    const auto p = Sxx.antenna_powers();
    double mean = 0.0;
    for (double x : p)
        mean += x;
    mean /= static_cast<double>(p.size());
    if (!(mean > 0.0) || !(target > 0.0))
        throw InputError("drive_amplitude: input and target power must be positive");
    return std::sqrt(target / mean);
}

double sample_rate(const PulseBank &pulses, int osf)
{
    if (pulses.family == PulseFamily::RectOfdm)
        return osf * pulses.N * pulses.f0;
    return osf / pulses.T;
}

namespace
{
// Signed frequency index of FFT bin j of length L
long long signed_bin(std::size_t j, std::size_t L)
{
    return j < (L + 1) / 2 ? static_cast<long long>(j) : static_cast<long long>(j) - static_cast<long long>(L);
}

std::size_t wrap_index(long long j, std::size_t n)
{
    const long long r = j % static_cast<long long>(n);
    return static_cast<std::size_t>(r < 0 ? r + static_cast<long long>(n) : r);
}

bool scheduled(const Schedule &s, std::size_t idx, std::size_t k)
{
    return s.empty() || s.at(idx).at(k);
}

void check_tx(const TxConfig &tx)
{
    const std::size_t K = tx.W.users();
    tx.xi.validate(K);
    if (tx.pulses.family == PulseFamily::RectOfdm)
    {
        if (tx.W.form != PrecodingMatrix::Form::Subcarrier && tx.W.form != PrecodingMatrix::Form::Flat)
            throw InputError("synthesize_tx: OFDM needs a per-subcarrier or flat precoder");
        if (!tx.schedule.empty() && tx.schedule.size() != tx.pulses.count())
            throw InputError("synthesize_tx: schedule must list every subcarrier");
    }
    if (tx.pulses.family == PulseFamily::RectOfdm && tx.synthesis != Synthesis::Pam)
        throw InputError("synthesize_tx: stationary synthesis is available for single carrier only");
    if (tx.pulses.family != PulseFamily::RectOfdm && tx.W.form == PrecodingMatrix::Form::Subcarrier)
        throw InputError("synthesize_tx: per-subcarrier precoder given for a single-carrier waveform");
}

// Per-bin precoder of a single-carrier block: W(i / n) for i = 0..n-1
std::vector<CMatrix> precoder_on_dft_grid(const PrecodingMatrix &W, std::size_t n)
{
    const std::size_t M = W.antennas(), K = W.users();
    if (W.form == PrecodingMatrix::Form::Flat)
        return {W.W.at(0)};
    if (W.taps.size() > n)
        throw InputError("synthesize_tx: block shorter than the precoder impulse response");
    std::vector<CMatrix> out(n, CMatrix::Zero(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(K)));
    FftPlan fwd(n, FftPlan::Direction::Forward);
    std::vector<cplx> buf(n);
    for (std::size_t m = 0; m < M; ++m)
        for (std::size_t k = 0; k < K; ++k)
        {
            std::fill(buf.begin(), buf.end(), cplx(0.0));
            for (std::size_t l = 0; l < W.taps.size(); ++l)
                buf[wrap_index(W.first_tap + static_cast<long long>(l), n)] +=
                    W.taps[l](static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
            fwd.execute(buf);
            for (std::size_t i = 0; i < n; ++i)
                out[i](static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k)) = buf[i];
        }
    return out;
}

SampleBlock synth_single_carrier(const TxConfig &tx, int osf, std::uint64_t seed, std::size_t n_sym,
                                 std::size_t block, double psi)
{
    const std::size_t M = tx.W.antennas(), K = tx.W.users();
    const std::size_t L = n_sym * static_cast<std::size_t>(osf);
    const double T = tx.pulses.T, Ts = T / osf, fs = 1.0 / Ts;

    std::vector<std::vector<cplx>> S(K, std::vector<cplx>(n_sym));
    FftPlan fwd(n_sym, FftPlan::Direction::Forward);
    for (std::size_t k = 0; k < K; ++k)
    {
        Rng rng(substream(seed, 0x73796d, block, k));
        for (auto &s : S[k])
            s = rng.cgauss(tx.xi.xi[k]);
        fwd.execute(S[k]);
    }
    const auto Wb = precoder_on_dft_grid(tx.W, n_sym);

    SampleBlock b;
    b.fs = fs;
    b.psi = psi;
    b.symbols = n_sym;
    b.samples.assign(M, std::vector<cplx>(L, 0.0));
    FftPlan inv(L, FftPlan::Direction::Inverse);
    CVector s(static_cast<Eigen::Index>(K));
    const bool stationary = tx.synthesis == Synthesis::StationaryGaussian;
    Rng bin_rng(substream(seed, 0x737461, block));
    const double bin_var = static_cast<double>(n_sym);
    for (std::size_t j = 0; j < L; ++j)
    {
        const long long jj = signed_bin(j, L);
        const double f = static_cast<double>(jj) * fs / static_cast<double>(L);
        const cplx P = tx.pulses.amplitude(0, f);
        if (P == 0.0)
            continue;
        const std::size_t i = wrap_index(jj, n_sym);
        // PAM repeats the symbol spectrum on every replica f + n/T; the stationary mode draws afresh
        for (std::size_t k = 0; k < K; ++k)
            s(static_cast<Eigen::Index>(k)) = stationary ? bin_rng.cgauss(bin_var * tx.xi.xi[k]) : S[k][i];
        const CVector z = Wb[Wb.size() == 1 ? 0 : i] * s;
        const cplx g = tx.amplitude / Ts * P * std::polar(1.0 / static_cast<double>(L), -2.0 * kPi * f * psi);
        for (std::size_t m = 0; m < M; ++m)
            b.samples[m][j] = g * z(static_cast<Eigen::Index>(m));
    }
    for (auto &x : b.samples)
        inv.execute(x);
    return b;
}

SampleBlock synth_ofdm(const TxConfig &tx, int osf, std::uint64_t seed, std::size_t n_sym, std::size_t block,
                       double psi)
{
    const auto &pb = tx.pulses;
    const std::size_t M = tx.W.antennas(), K = tx.W.users(), N = pb.count();
    const std::size_t Q = static_cast<std::size_t>(osf) * N;
    const std::size_t n_ofdm = (n_sym + N - 1) / N;
    const std::size_t L = n_ofdm * Q;
    const double fs = sample_rate(pb, osf);
    const double inv_n = 1.0 / static_cast<double>(pb.N);

    SampleBlock b;
    b.fs = fs;
    b.psi = psi;
    b.symbols = n_ofdm * N;
    b.samples.assign(M, std::vector<cplx>(L, 0.0));

    Rng rng(substream(seed, 0x73796d, block));
    FftPlan q_inv(Q, FftPlan::Direction::Inverse);
    std::vector<std::vector<cplx>> buf(M, std::vector<cplx>(Q));
    CVector s(static_cast<Eigen::Index>(K));
    const double scale = 1.0 / std::sqrt(pb.T);
    for (std::size_t n = 0; n < n_ofdm; ++n)
    {
        for (auto &v : buf)
            std::fill(v.begin(), v.end(), cplx(0.0));
        for (std::size_t idx = 0; idx < N; ++idx)
        {
            for (std::size_t k = 0; k < K; ++k)
                s(static_cast<Eigen::Index>(k)) =
                    scheduled(tx.schedule, idx, k) ? rng.cgauss(tx.xi.xi[k] * inv_n) : cplx(0.0);
            const CMatrix &W = tx.W.form == PrecodingMatrix::Form::Flat ? tx.W.W.at(0) : tx.W.subcarrier(idx);
            const CVector z = W * s;
            const std::size_t bin = wrap_index(pb.subcarriers[idx], Q);
            for (std::size_t m = 0; m < M; ++m)
                buf[m][bin] += z(static_cast<Eigen::Index>(m));
        }
        for (std::size_t m = 0; m < M; ++m)
        {
            q_inv.execute(buf[m]);
            std::copy(buf[m].begin(), buf[m].end(), b.samples[m].begin() + static_cast<std::ptrdiff_t>(n * Q));
        }
    }

    // Low-pass filter and timing offset on the circular block
    FftPlan fwd(L, FftPlan::Direction::Forward), inv(L, FftPlan::Direction::Inverse);
    std::vector<cplx> shape(L);
    for (std::size_t j = 0; j < L; ++j)
    {
        const double f = static_cast<double>(signed_bin(j, L)) * fs / static_cast<double>(L);
        double z = 1.0;
        if (pb.lowpass)
        {
            const double e = std::abs(f) - 0.5 * pb.B;
            z = e > 1e-12 * pb.B ? 0.0 : (std::abs(e) <= 1e-12 * pb.B ? std::sqrt(0.5) : 1.0);
        }
        shape[j] = std::polar(tx.amplitude * scale * z / static_cast<double>(L), -2.0 * kPi * f * psi);
    }
    for (auto &x : b.samples)
    {
        fwd.execute(x);
        for (std::size_t j = 0; j < L; ++j)
            x[j] *= shape[j];
        inv.execute(x);
    }
    return b;
}

std::size_t memory_span(double tap_period, double sample_period, std::size_t n_taps)
{
    if (n_taps <= 1)
        return 0;
    return static_cast<std::size_t>(std::llround(tap_period / sample_period)) * (n_taps - 1);
}

// Runs fn on x extended circularly by `pad` leading samples, then drops them
template <class Fn>
std::vector<cplx> circular(const std::vector<cplx> &x, std::size_t pad, Fn fn)
{
    if (pad == 0)
        return fn(x);
    if (pad > x.size())
        throw InputError("mc oracle: block shorter than the amplifier memory");
    std::vector<cplx> ext(x.end() - static_cast<std::ptrdiff_t>(pad), x.end());
    ext.insert(ext.end(), x.begin(), x.end());
    auto y = fn(ext);
    return std::vector<cplx>(y.begin() + static_cast<std::ptrdiff_t>(pad), y.end());
}
} // namespace

SampleBlock synthesize_tx(const TxConfig &tx, int osf, int max_order, std::uint64_t seed, std::size_t n_symbols,
                          std::size_t block)
{
    if (n_symbols < 1000)
        throw InputError("synthesize_tx: at least 1000 symbols per block required");
    if (osf < max_order)
        throw InputError("synthesize_tx: oversampling factor " + std::to_string(osf) + " is below the order " +
                         std::to_string(max_order));
    if (sample_rate(tx.pulses, osf) < max_order * tx.pulses.B * (1.0 - 1e-12))
        throw InputError("synthesize_tx: sample rate below order x bandwidth; raise the oversampling factor");
    check_tx(tx);
    Rng rng(substream(seed, 0x707369, block));
    const double psi = rng.uniform(0.0, tx.pulses.T);
    if (tx.pulses.family == PulseFamily::RectOfdm)
        return synth_ofdm(tx, osf, seed, n_symbols, block, psi);
    return synth_single_carrier(tx, osf, seed, n_symbols, block, psi);
}

WelchAccumulator::WelchAccumulator(std::size_t antennas, double fs, WelchConfig cfg)
    : M_(antennas), fs_(fs), cfg_(cfg)
{
    cfg_.validate();
    if (M_ == 0 || !(fs_ > 0.0))
        throw InputError("welch: need at least one antenna and a positive sample rate");
    win_ = cfg_.coefficients();
    for (double w : win_)
        win_power_ += w * w;
    acc_.assign(cfg_.segment, CMatrix::Zero(static_cast<Eigen::Index>(M_), static_cast<Eigen::Index>(M_)));
}

void WelchAccumulator::add(const SampleBlock &b)
{
    if (b.antennas() != M_)
        throw InputError("welch: block antenna count differs");
    if (std::abs(b.fs - fs_) > 1e-12 * fs_)
        throw InputError("welch: block sample rate differs");
    const std::size_t n = cfg_.segment;
    const std::size_t hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(n * (1.0 - cfg_.overlap))));
    FftPlan fwd(n, FftPlan::Direction::Forward);
    CMatrix X(static_cast<Eigen::Index>(M_), static_cast<Eigen::Index>(n));
    std::vector<cplx> buf(n);
    for (std::size_t start = 0; start + n <= b.length(); start += hop)
    {
        for (std::size_t m = 0; m < M_; ++m)
        {
            for (std::size_t i = 0; i < n; ++i)
                buf[i] = win_[i] * b.samples[m][start + i];
            fwd.execute(buf);
            for (std::size_t i = 0; i < n; ++i)
                X(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(i)) = buf[i];
        }
        for (std::size_t i = 0; i < n; ++i)
        {
            const auto c = X.col(static_cast<Eigen::Index>(i));
            acc_[i].noalias() += c * c.adjoint();
        }
        ++segments_;
    }
}

SpectralMatrix WelchAccumulator::result() const
{
    if (segments_ < 8)
        throw InputError("welch: at least 8 segments required, got " + std::to_string(segments_));
    const std::size_t n = cfg_.segment;
    const std::size_t h = n / 2 - 1;
    FrequencyGrid grid(fs_ / static_cast<double>(n), h);
    const double norm = 1.0 / (fs_ * win_power_ * static_cast<double>(segments_));
    std::vector<CMatrix> mats(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        mats[i] = acc_[wrap_index(static_cast<long long>(i) - static_cast<long long>(h), n)] * norm;
    return SpectralMatrix::from_dense(grid, std::move(mats));
}

SpectralMatrix welch_cross_psd(const std::vector<SampleBlock> &blocks, const WelchConfig &cfg)
{
    if (blocks.empty())
        throw InputError("welch: no blocks");
    WelchAccumulator acc(blocks[0].antennas(), blocks[0].fs, cfg);
    for (const auto &b : blocks)
        acc.add(b);
    return acc.result();
}

double BussgangSplit::max_correlation() const
{
    double c = 0.0;
    for (double x : correlation)
        c = std::max(c, x);
    return c;
}

double BussgangSplit::additivity_error() const
{
    double e = 0.0;
    for (std::size_t m = 0; m < power_y.size(); ++m)
        if (power_y[m] > 0.0)
            e = std::max(e, std::abs(power_y[m] - power_u[m] - power_d[m]) / power_y[m]);
    return e;
}

SampleBlock amplify(const SampleBlock &x, const MemoryPolynomialPA &pa)
{
    SampleBlock y = x;
    const double Ts = 1.0 / x.fs;
    std::size_t L = 1;
    for (const auto &t : pa.taps)
        L = std::max(L, t.size());
    const std::size_t pad = memory_span(pa.tap_period_s, Ts, L);
    for (std::size_t m = 0; m < x.antennas(); ++m)
        y.samples[m] = circular(x.samples[m], pad, [&](const std::vector<cplx> &v) { return apply_pa_time(v, pa, Ts); });
    return y;
}

BussgangSplit bussgang_split(const SampleBlock &x, const SampleBlock &y, const HermiteKernels &kernels)
{
    if (x.antennas() != y.antennas() || x.length() != y.length())
        throw InputError("bussgang_split: input and output blocks are not aligned");
    if (kernels.antennas() != x.antennas())
        throw InputError("bussgang_split: kernels for a different antenna count");
    const double Ts = 1.0 / x.fs;
    BussgangSplit r;
    r.u = x;
    r.d = x;
    for (std::size_t m = 0; m < x.antennas(); ++m)
    {
        const std::size_t pad = memory_span(kernels.tap_period_s, Ts, kernels.taps[m][0].size());
        r.u.samples[m] = circular(x.samples[m], pad,
                                  [&](const std::vector<cplx> &v) { return apply_linear_part(v, kernels, m, Ts); });
        cplx cross = 0.0;
        double pu = 0.0, pd = 0.0, py = 0.0;
        for (std::size_t n = 0; n < x.length(); ++n)
        {
            const cplx u = r.u.samples[m][n];
            const cplx d = y.samples[m][n] - u;
            r.d.samples[m][n] = d;
            cross += u * std::conj(d);
            pu += std::norm(u);
            pd += std::norm(d);
            py += std::norm(y.samples[m][n]);
        }
        const double len = static_cast<double>(x.length());
        r.correlation.push_back(pd > 0.0 && pu > 0.0 ? std::abs(cross) / std::sqrt(pu * pd) : 0.0);
        r.cross.push_back(cross / len);
        r.power_u.push_back(pu / len);
        r.power_d.push_back(pd / len);
        r.power_y.push_back(py / len);
    }
    return r;
}

namespace
{
double interp(const std::vector<double> &v, const FrequencyGrid &g, double f)
{
    const double p = (f - g.f_min()) / g.df();
    if (p < 0.0 || p > static_cast<double>(g.size() - 1))
        return 0.0;
    const std::size_t i = std::min(static_cast<std::size_t>(p), g.size() - 2);
    const double t = p - static_cast<double>(i);
    return (1.0 - t) * v[i] + t * v[i + 1];
}

cplx interp(const std::vector<cplx> &v, const FrequencyGrid &g, double f)
{
    const double p = (f - g.f_min()) / g.df();
    if (p < 0.0 || p > static_cast<double>(g.size() - 1))
        return 0.0;
    const std::size_t i = std::min(static_cast<std::size_t>(p), g.size() - 2);
    const double t = p - static_cast<double>(i);
    return (1.0 - t) * v[i] + t * v[i + 1];
}

// Expected-periodogram smoothing of the analytic values at the Welch bins
std::vector<double> window_kernel(WindowFamily w)
{
    if (w == WindowFamily::Hann)
        return {1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0};
    if (w == WindowFamily::Hamming)
    {
        const double a = 0.54 * 0.54, b = 0.23 * 0.23, s = a + 2.0 * b;
        return {b / s, a / s, b / s};
    }
    return {0.0, 1.0, 0.0};
}

template <class T>
std::vector<T> smooth(const std::vector<T> &v, const std::vector<double> &k)
{
    std::vector<T> out(v.size(), T(0.0));
    for (std::size_t i = 0; i < v.size(); ++i)
    {
        const T lo = i > 0 ? v[i - 1] : T(0.0);
        const T hi = i + 1 < v.size() ? v[i + 1] : T(0.0);
        out[i] = k[0] * lo + k[1] * v[i] + k[2] * hi;
    }
    return out;
}

struct Compared
{
    std::vector<double> analytic, estimate;
    std::vector<bool> mask;
};

ComponentDeviation grouped_deviation(const std::string &name, const Compared &c, const FrequencyGrid &g,
                                     std::size_t width)
{
    ComponentDeviation r;
    r.component = name;
    for (std::size_t i0 = 0; i0 + width <= c.analytic.size(); i0 += width)
    {
        double a = 0.0, e = 0.0;
        bool ok = true;
        for (std::size_t i = i0; i < i0 + width; ++i)
        {
            ok = ok && c.mask[i];
            a += c.analytic[i];
            e += c.estimate[i];
        }
        if (!ok)
            continue;
        ++r.groups;
        const double dev = e > 0.0 ? std::abs(10.0 * std::log10(e / a)) : std::numeric_limits<double>::infinity();
        if (dev > r.max_dev_db)
        {
            r.max_dev_db = dev;
            r.at_f = g.at(i0 + width / 2);
        }
    }
    return r;
}
} // namespace

ValidationReport validate(const DistortionDecomposition &D, const TxConfig &tx, const MemoryPolynomialPA &pa,
                          const McSettings &settings, std::uint64_t seed, double tolerance_db)
{
    const std::size_t M = D.antennas();
    if (tx.W.antennas() != M)
        throw InputError("validate: precoder and decomposition disagree on the antenna count");
    if (!(tolerance_db > 0.0))
        throw InputError("validate: tolerance must be positive");
    if (settings.blocks < 1 || settings.average_bins < 1)
        throw InputError("validate: blocks and average_bins must be >= 1");
    settings.welch.validate();

    ValidationReport rep;
    rep.tolerance_db = tolerance_db;
    rep.osf = settings.osf > 0 ? settings.osf : 2 * pa.max_order();
    rep.fs = sample_rate(tx.pulses, rep.osf);

    const std::size_t per_block = (settings.samples + settings.blocks - 1) / settings.blocks;
    const std::size_t spb = static_cast<std::size_t>(rep.osf); // samples per data symbol, both families
    const std::size_t n_sym = std::max<std::size_t>(1000, (per_block + spb - 1) / spb);

    const auto kernels = b_to_a(pa, D.sigma);
    TxConfig drive = tx;
    drive.amplitude *= std::pow(10.0, settings.drive_mismatch_db / 20.0);

    WelchAccumulator wy(M, rep.fs, settings.welch), wu(M, rep.fs, settings.welch), wd(M, rep.fs, settings.welch);
    std::vector<double> py(M, 0.0), pu(M, 0.0), pd(M, 0.0);
    std::vector<cplx> cross(M, 0.0);
    for (std::size_t b = 0; b < settings.blocks; ++b)
    {
        const auto x = synthesize_tx(drive, rep.osf, pa.max_order(), seed, n_sym, b);
        const auto y = amplify(x, pa);
        const auto split = bussgang_split(x, y, kernels);
        wy.add(y);
        wu.add(split.u);
        wd.add(split.d);
        rep.samples += x.length();
        for (std::size_t m = 0; m < M; ++m)
        {
            py[m] += split.power_y[m];
            pu[m] += split.power_u[m];
            pd[m] += split.power_d[m];
            cross[m] += split.cross[m];
        }
    }
    // Statistics pooled over blocks (equal block lengths, so plain sums)
    for (std::size_t m = 0; m < M; ++m)
    {
        rep.residual_power += py[m] > 0.0 ? pd[m] / py[m] / static_cast<double>(M) : 0.0;
        if (pu[m] > 0.0 && pd[m] > 0.0)
            rep.bussgang_correlation = std::max(rep.bussgang_correlation, std::abs(cross[m]) / std::sqrt(pu[m] * pd[m]));
        if (py[m] > 0.0)
            rep.additivity_error = std::max(rep.additivity_error, std::abs(py[m] - pu[m] - pd[m]) / py[m]);
    }
    rep.segments = wy.segments();
    rep.Syy = wy.result();
    rep.Suu = wu.result();
    rep.Sdd = wd.result();

    const auto &wg = rep.Syy.grid();
    const double B = tx.pulses.B;
    const auto kern = window_kernel(settings.welch.window);
    const double floor_ratio = std::pow(10.0, settings.mask_dbc / 10.0);
    const std::size_t width = settings.average_bins;

    auto analytic_at_bins = [&](const SpectralMatrix &S, std::size_t m) {
        const auto v = S.diagonal(m);
        std::vector<double> a(wg.size());
        for (std::size_t i = 0; i < wg.size(); ++i)
            a[i] = std::max(0.0, interp(v, D.grid(), wg.at(i)));
        return smooth(a, kern);
    };
    auto in_band = [&](std::size_t i) { return std::abs(wg.at(i)) <= settings.band_limit * B; };

    struct Part
    {
        const char *name;
        const SpectralMatrix *analytic;
        const SpectralMatrix *estimate;
    };
    const Part parts[] = {{"yy", &D.Syy, &rep.Syy}, {"uu", &D.Suu, &rep.Suu}, {"dd", &D.Sdd, &rep.Sdd}};
    std::vector<ComponentDeviation> worst(3);
    for (std::size_t p = 0; p < 3; ++p)
        worst[p].component = parts[p].name;
    for (std::size_t m = 0; m < M; ++m)
    {
        const auto ref = analytic_at_bins(D.Syy, m);
        const double peak = *std::max_element(ref.begin(), ref.end());
        for (std::size_t p = 0; p < 3; ++p)
        {
            Compared c;
            c.analytic = analytic_at_bins(*parts[p].analytic, m);
            c.estimate = parts[p].estimate->diagonal(m);
            c.mask.resize(wg.size());
            for (std::size_t i = 0; i < wg.size(); ++i)
                c.mask[i] = in_band(i) && c.analytic[i] > floor_ratio * peak;
            auto dev = grouped_deviation(parts[p].name, c, wg, width);
            worst[p].groups += dev.groups;
            if (dev.max_dev_db >= worst[p].max_dev_db)
            {
                worst[p].max_dev_db = dev.max_dev_db;
                worst[p].at_f = dev.at_f;
            }
        }
    }
    rep.components = worst;

    // Off-diagonal magnitudes of S_yy where the two antennas are strongly coherent
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    if (M > 1)
        pairs.push_back({0, 1});
    if (M > 2)
        pairs.push_back({0, M - 1});
    for (const auto &[a, b] : pairs)
    {
        const auto va = D.Syy.entry_series(a, b);
        std::vector<cplx> ab(wg.size());
        for (std::size_t i = 0; i < wg.size(); ++i)
            ab[i] = interp(va, D.grid(), wg.at(i));
        ab = smooth(ab, kern);
        const auto sa = analytic_at_bins(D.Syy, a), sb = analytic_at_bins(D.Syy, b);
        const double peak = std::sqrt(*std::max_element(sa.begin(), sa.end()) * *std::max_element(sb.begin(), sb.end()));
        const auto est = rep.Syy.entry_series(a, b);
        Compared c;
        c.mask.resize(wg.size());
        for (std::size_t i = 0; i < wg.size(); ++i)
        {
            c.analytic.push_back(std::abs(ab[i]));
            c.estimate.push_back(std::abs(est[i]));
            c.mask[i] = in_band(i) && std::abs(ab[i]) > floor_ratio * peak &&
                        std::norm(ab[i]) >= settings.coherence_min * settings.coherence_min * sa[i] * sb[i];
        }
        rep.components.push_back(grouped_deviation(
            "yy(" + std::to_string(a) + "," + std::to_string(b) + ")", c, wg, width));
    }

    rep.pass = true;
    for (const auto &c : rep.components)
    {
        rep.max_dev_db = std::max(rep.max_dev_db, c.max_dev_db);
        if (c.groups > 0 && !(c.max_dev_db <= tolerance_db))
            rep.pass = false;
    }
    if (rep.components[0].groups == 0)
        rep.pass = false; // nothing compared
    return rep;
}

namespace
{
template <class T>
void put(std::ostream &out, T v)
{
    static_assert(std::endian::native == std::endian::little, "sample dump assumes a little-endian host");
    out.write(reinterpret_cast<const char *>(&v), sizeof(T));
}

template <class T>
T get(std::istream &in)
{
    T v{};
    in.read(reinterpret_cast<char *>(&v), sizeof(T));
    if (!in)
        throw InputError("read_samples: truncated file");
    return v;
}

constexpr char kMagic[8] = {'A', 'D', 'M', 'C', 'R', 'A', 'W', '1'};
} // namespace

void write_samples(std::ostream &out, const SampleBlock &b)
{
    out.write(kMagic, 8);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(b.antennas()));
    put<std::uint64_t>(out, b.length());
    put<double>(out, b.fs);
    put<double>(out, b.psi);
    for (const auto &s : b.samples)
        for (const auto &v : s)
        {
            put<double>(out, v.real());
            put<double>(out, v.imag());
        }
}

SampleBlock read_samples(std::istream &in)
{
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0)
        throw InputError("read_samples: not a sample dump");
    SampleBlock b;
    const auto M = get<std::uint32_t>(in);
    const auto L = get<std::uint64_t>(in);
    b.fs = get<double>(in);
    b.psi = get<double>(in);
    b.samples.assign(M, std::vector<cplx>(L));
    for (auto &s : b.samples)
        for (auto &v : s)
        {
            const double re = get<double>(in);
            v = {re, get<double>(in)};
        }
    return b;
}

} // namespace arraydist
