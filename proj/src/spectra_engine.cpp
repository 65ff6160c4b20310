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

#include "arraydist/spectra_engine.hpp"

#include "arraydist/hermitian_eig.hpp"

#include <algorithm>
#include <cmath>

namespace arraydist
{

namespace
{
double factorial(int n)
{
    double r = 1.0;
    for (int i = 2; i <= n; ++i)
        r *= i;
    return r;
}

void require_odd_order(int order)
{
    if (order < 1 || order % 2 == 0)
        throw InputError("modulation term: order must be odd and >= 1, got " + std::to_string(order));
}
} // namespace

void check_grid_extent(const SpectralMatrix &Sxx, int order)
{
    require_odd_order(order);
    const auto &g = Sxx.grid();
    const auto tr = Sxx.trace();
    const double limit = (g.f_max() + 0.5 * g.df()) / order;
    double total = 0.0, outside = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
    {
        const double v = std::abs(tr.values[i]);
        total += v;
        if (std::abs(g.at(i)) > limit)
            outside += v;
    }
    // Non-bandlimited inputs (unfiltered OFDM) are accepted when their tails carry under 1% of the power
    if (total > 0.0 && outside > 1e-2 * total)
        throw InputError("grid extent " + std::to_string(g.f_max()) + " Hz cannot hold the order-" +
                         std::to_string(order) + " support of the input spectrum; increase the grid order");
}

std::vector<SpectralMatrix> modulation_terms(const SpectralMatrix &Sxx, int max_order, const ConvOptions &opt)
{
    require_odd_order(max_order);
    check_grid_extent(Sxx, max_order);
    std::vector<SpectralMatrix> out;
    out.push_back(Sxx);
    if (max_order == 1)
        return out;
    const SpectralMatrix Q = conj_reflect(Sxx);
    // chain[w] = S * .. * S * Q * .. * Q with (w+1)/2 and (w-1)/2 factors, without the prefactor
    SpectralMatrix chain = Sxx;
    for (int w = 3; w <= max_order; w += 2)
    {
        chain = elementwise_conv(elementwise_conv(chain, Sxx, opt), Q, opt);
        const int p = (w + 1) / 2, q = (w - 1) / 2;
        out.push_back(chain.scaled(factorial(p) * factorial(q)));
    }
    return out;
}

SpectralMatrix modulation_term(const SpectralMatrix &Sxx, int order, const ConvOptions &opt)
{
    return modulation_terms(Sxx, order, opt).back();
}

const SpectralMatrix &DistortionDecomposition::order_term(int order) const
{
    for (std::size_t i = 0; i < orders.size(); ++i)
        if (orders[i] == order)
            return order_terms[i];
    throw InputError("decomposition: no term of order " + std::to_string(order));
}

std::vector<double> antenna_rms(const SpectralMatrix &Sxx)
{
    std::vector<double> s;
    for (double p : Sxx.antenna_powers())
        s.push_back(std::sqrt(std::max(0.0, p)));
    return s;
}

namespace
{
SpectralMatrix apply_kernel(const SpectralMatrix &S, const HermiteKernels &k, int order)
{
    const std::size_t M = S.dim();
    if (k.memoryless())
    {
        CVector a(M);
        for (std::size_t m = 0; m < M; ++m)
            a(m) = k.coeff(m, order);
        return S.sandwich(a);
    }
    const auto &g = S.grid();
    std::vector<CVector> a(g.size(), CVector(M));
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t m = 0; m < M; ++m)
            a[i](m) = k.response(m, order, g.at(i));
    return S.sandwich(a);
}

bool order_active(const HermiteKernels &k, int order)
{
    for (std::size_t m = 0; m < k.antennas(); ++m)
    {
        const auto &taps = k.taps[m][static_cast<std::size_t>((order - 1) / 2)];
        for (const auto &t : taps)
            if (t != cplx(0.0, 0.0))
                return true;
    }
    return false;
}

double psd_floor(const SpectralMatrix &S, const std::vector<std::size_t> &idx)
{
    double worst = 0.0;
    for (std::size_t i : idx)
    {
        const CMatrix A = S.at(i);
        if (A.norm() == 0.0)
            continue;
        const auto e = hermitian_eig(0.5 * (A + A.adjoint()));
        if (e.values(0) > 0.0)
            worst = std::min(worst, e.values(e.values.size() - 1) / e.values(0));
    }
    return worst;
}
} // namespace

DistortionDecomposition amplified_psd(const SpectralMatrix &Sxx, const HermiteKernels &kernels, const EngineOptions &opt)
{
    const std::size_t M = Sxx.dim();
    if (kernels.antennas() != M)
        throw InputError("amplified_psd: kernels for " + std::to_string(kernels.antennas()) + " antennas, spectrum has " +
                         std::to_string(M));
    DistortionDecomposition D;
    D.Sxx = Sxx;
    D.sigma = antenna_rms(Sxx);
    for (std::size_t m = 0; m < M; ++m)
        if (std::abs(kernels.sigma[m] - D.sigma[m]) > 1e-6 * std::max(D.sigma[m], 1e-300))
            throw InputError("amplified_psd: kernels were built for a different input level on antenna " +
                             std::to_string(m));

    int top = 1;
    for (int w = 3; w <= kernels.max_order(); w += 2)
        if (order_active(kernels, w))
            top = w;
    const auto terms = modulation_terms(Sxx, top, opt.conv);

    D.Suu = apply_kernel(terms[0], kernels, 1);
    D.Sdd = SpectralMatrix(Sxx.grid(), M);
    for (int w = 3; w <= top; w += 2)
    {
        D.orders.push_back(w);
        D.order_terms.push_back(apply_kernel(terms[static_cast<std::size_t>((w - 1) / 2)], kernels, w));
        D.Sdd += D.order_terms.back();
    }
    D.Syy = D.Suu + D.Sdd;

    if (opt.psd_check_points > 0 && M <= opt.psd_check_max_dim)
    {
        const auto tr = D.Syy.trace();
        const double peak = tr.peak();
        std::vector<std::size_t> live;
        for (std::size_t i = 0; i < tr.values.size(); ++i)
            if (tr.values[i] > 1e-12 * peak)
                live.push_back(i);
        std::vector<std::size_t> idx;
        for (std::size_t j = 0; j < opt.psd_check_points && !live.empty(); ++j)
            idx.push_back(live[j * (live.size() - 1) / std::max<std::size_t>(1, opt.psd_check_points - 1)]);
        double worst = std::min(psd_floor(D.Suu, idx), psd_floor(D.Syy, idx));
        for (const auto &t : D.order_terms)
            worst = std::min(worst, psd_floor(t, idx));
        D.psd_floor = worst;
    }
    return D;
}

DistortionDecomposition amplified_psd(const SpectralMatrix &Sxx, const MemoryPolynomialPA &pa, const EngineOptions &opt)
{
    return amplified_psd(Sxx, b_to_a(pa, antenna_rms(Sxx)), opt);
}

double drive_power(const MemoryPolynomialPA &pa, double backoff_db)
{
    const double r = one_db_compression(pa);
    return r * r * std::pow(10.0, -backoff_db / 10.0);
}

SpectralMatrix scale_to_mean_power(const SpectralMatrix &Sxx, double target)
{
    const auto p = Sxx.antenna_powers();
    double mean = 0.0;
    for (double x : p)
        mean += x;
    mean /= static_cast<double>(p.size());
    if (!(mean > 0.0))
        throw InputError("scale_to_mean_power: input has no power");
    return Sxx.scaled(target / mean);
}

ScalarSpectrum total_tx_psd(const SpectralMatrix &Syy)
{
    auto tr = Syy.trace();
    for (double &v : tr.values)
        v = std::max(0.0, v);
    return tr;
}

ReceiverLocation ReceiverLocation::line_of_sight(const ArrayGeometry &g, double theta_rad, std::string label)
{
    ReceiverLocation r;
    r.h = {steering_vector(g, theta_rad)};
    r.beta = 1.0;
    r.label = std::move(label);
    return r;
}

ReceiverLocation ReceiverLocation::from_channel(const ChannelModel &ch, std::size_t user, const FrequencyGrid &grid,
                                                std::string label)
{
    ReceiverLocation r;
    if (ch.narrowband)
        r.h = {ch.user_response(user, 0.0)};
    else
        for (std::size_t i = 0; i < grid.size(); ++i)
            r.h.push_back(ch.user_response(user, grid.at(i)));
    r.beta = user < ch.beta.size() ? ch.beta[user] : 1.0;
    r.label = std::move(label);
    return r;
}

ReceiverLocation ReceiverLocation::normalized(std::size_t M) const
{
    double mean = 0.0;
    for (const auto &v : h)
        mean += v.squaredNorm();
    mean /= static_cast<double>(h.size());
    if (!(mean > 0.0))
        throw InputError("receiver location: zero channel cannot be normalized");
    ReceiverLocation r = *this;
    r.beta = static_cast<double>(M) / mean;
    return r;
}

ScalarSpectrum received_component(const SpectralMatrix &S, const ReceiverLocation &loc)
{
    ScalarSpectrum out;
    if (loc.h.size() == 1)
        out = S.quadratic_spectrum(CVector(loc.h[0].conjugate()));
    else
    {
        if (loc.h.size() != S.size())
            throw InputError("received_psd: location sampled on a different grid");
        std::vector<CVector> v;
        v.reserve(loc.h.size());
        for (const auto &x : loc.h)
            v.push_back(x.conjugate());
        out = S.quadratic_spectrum(v);
    }
    for (double &x : out.values)
        x = std::max(0.0, loc.beta * x);
    return out;
}

ReceivedSpectra received_psd(const DistortionDecomposition &D, const ReceiverLocation &loc)
{
    ReceivedSpectra r;
    r.linear = received_component(D.Suu, loc);
    r.distortion = received_component(D.Sdd, loc);
    for (const auto &t : D.order_terms)
        r.per_order.push_back(received_component(t, loc));
    r.total = r.linear;
    for (std::size_t i = 0; i < r.total.values.size(); ++i)
        r.total.values[i] += r.distortion.values[i];
    return r;
}

} // namespace arraydist
