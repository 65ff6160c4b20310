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

#include "arraydist/hermite_pa.hpp"

#include "arraydist/random.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace arraydist
{

namespace
{

double factorial(int n)
{
    double f = 1.0;
    for (int i = 2; i <= n; ++i)
        f *= i;
    return f;
}

double binomial(int n, int k)
{
    if (k < 0 || k > n)
        return 0.0;
    return factorial(n) / (factorial(k) * factorial(n - k));
}

void check_order(int order)
{
    if (order < 1 || order % 2 == 0)
        throw InputError("order must be odd and >= 1");
}

cplx fir_response(const std::vector<cplx> &taps, double period, double f)
{
    cplx s = 0.0;
    for (std::size_t l = 0; l < taps.size(); ++l)
        s += taps[l] * std::polar(1.0, -2.0 * kPi * f * period * static_cast<double>(l));
    return s;
}

std::size_t tap_stride(double tap_period, double sample_period, std::size_t n_taps)
{
    if (n_taps <= 1)
        return 1;
    if (!(sample_period > 0.0))
        throw InputError("sample period must be positive");
    double r = tap_period / sample_period;
    double k = std::round(r);
    if (k < 1.0 || std::abs(r - k) > 1e-9 * r)
        throw InputError("kernel tap period is not an integer multiple of the sample period");
    return static_cast<std::size_t>(k);
}

// z filtered by taps spaced 'stride' samples, zero initial state
void fir_accumulate(const std::vector<cplx> &z, const std::vector<cplx> &taps, std::size_t stride, std::vector<cplx> &y)
{
    for (std::size_t l = 0; l < taps.size(); ++l)
    {
        if (taps[l] == 0.0)
            continue;
        std::size_t off = l * stride;
        for (std::size_t n = off; n < z.size(); ++n)
            y[n] += taps[l] * z[n - off];
    }
}

} // namespace

bool MemoryPolynomialPA::memoryless() const
{
    for (const auto &t : taps)
        if (t.size() > 1)
            return false;
    return true;
}

cplx MemoryPolynomialPA::coeff(int order) const
{
    check_order(order);
    std::size_t q = static_cast<std::size_t>(order / 2);
    if (q >= taps.size())
        return 0.0;
    cplx s = 0.0;
    for (auto v : taps[q])
        s += v;
    return s;
}

cplx MemoryPolynomialPA::response(int order, double f) const
{
    check_order(order);
    std::size_t q = static_cast<std::size_t>(order / 2);
    return q < taps.size() ? fir_response(taps[q], tap_period_s, f) : cplx(0.0);
}

MemoryPolynomialPA MemoryPolynomialPA::memoryless_pa(const std::vector<cplx> &b, std::string name)
{
    MemoryPolynomialPA pa;
    pa.name = std::move(name);
    for (auto v : b)
        pa.taps.push_back({v});
    return pa;
}

MemoryPolynomialPA parse_pa(std::istream &in)
{
    MemoryPolynomialPA pa;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        std::string head;
        if (!(ls >> head))
            continue;
        auto fail = [&](const std::string &why) {
            throw InputError("PA file line " + std::to_string(lineno) + ": " + why);
        };
        if (head == "b")
        {
            int order = 0;
            if (!(ls >> order) || order < 1 || order % 2 == 0)
                fail("order must be odd and >= 1");
            std::vector<cplx> taps;
            double re, im;
            while (ls >> re)
            {
                if (!(ls >> im))
                    fail("tap needs real and imaginary part");
                taps.push_back({re, im});
            }
            if (taps.empty())
                fail("order " + std::to_string(order) + " has no taps");
            std::size_t q = static_cast<std::size_t>(order / 2);
            if (pa.taps.size() <= q)
                pa.taps.resize(q + 1);
            if (!pa.taps[q].empty())
                fail("order " + std::to_string(order) + " given twice");
            pa.taps[q] = taps;
        }
        else
        {
            std::string eq, value;
            if (!(ls >> eq) || eq != "=" || !(ls >> value))
                fail("expected 'key = value' or 'b <order> <re> <im> ...'");
            if (head == "name")
                pa.name = value;
            else if (head == "version")
                pa.version = std::stoi(value);
            else if (head == "tap_period_s")
                pa.tap_period_s = std::stod(value);
            else
                fail("unknown key '" + head + "'");
        }
    }
    if (pa.taps.empty())
        throw InputError("PA file: no coefficients");
    for (auto &t : pa.taps)
        if (t.empty())
            t = {0.0};
    if (std::abs(pa.coeff(1)) == 0.0)
        throw InputError("PA file: linear kernel b1 must be nonzero");
    if (pa.max_order() > kMaxSupportedOrder)
        throw InputError("PA file: orders above 9 are not supported");
    if (!pa.memoryless() && !(pa.tap_period_s > 0.0))
        throw InputError("PA file: tap_period_s must be positive for kernels with memory");
    return pa;
}

MemoryPolynomialPA load_pa(const std::string &path)
{
    std::ifstream f(path);
    if (!f)
        throw InputError("cannot open PA file '" + path + "'");
    return parse_pa(f);
}

void write_pa(std::ostream &out, const MemoryPolynomialPA &pa)
{
    out << "name = " << pa.name << "\nversion = " << pa.version << "\n";
    out << std::setprecision(17) << "tap_period_s = " << pa.tap_period_s << "\n";
    for (std::size_t q = 0; q < pa.taps.size(); ++q)
    {
        out << "b " << 2 * q + 1;
        for (auto v : pa.taps[q])
            out << ' ' << v.real() << ' ' << v.imag();
        out << '\n';
    }
}

cplx hermite_poly(int order, cplx x)
{
    check_order(order);
    const int q = order / 2;
    const double r2 = std::norm(x);
    cplx s = 0.0;
    double pw = 1.0; // |x|^{2p}
    for (int p = 0; p <= q; ++p)
    {
        s += hermite_coeff(q, p) * pw * x;
        pw *= r2;
    }
    return s;
}

double hermite_norm(int order)
{
    check_order(order);
    return factorial((order + 1) / 2) * factorial((order - 1) / 2);
}

double hermite_coeff(int q, int p)
{
    if (p < 0 || p > q)
        return 0.0;
    const int i = q - p;
    return ((i % 2) ? -1.0 : 1.0) * factorial(i) * binomial(q + 1, i) * binomial(q, i);
}

double kernel_conversion_coeff(int p, int q)
{
    if (q < 0 || q > p)
        return 0.0;
    return binomial(p, q) * factorial(p + 1) / factorial(q + 1);
}

MeanEstimate gaussian_expectation(const std::function<cplx(cplx)> &g, double variance, std::size_t samples,
                                  std::uint64_t seed, double proposal_factor)
{
    if (!(variance > 0.0) || !(proposal_factor > 0.5) || samples < 2)
        throw InputError("gaussian_expectation: invalid parameters");
    Rng rng(seed);
    const double shrink = 1.0 - 1.0 / proposal_factor;
    cplx sum = 0.0;
    double sum2 = 0.0;
    for (std::size_t n = 0; n < samples; ++n)
    {
        cplx x = rng.cgauss(proposal_factor * variance);
        double w = proposal_factor * std::exp(-std::norm(x) / variance * shrink);
        cplx z = w * g(x);
        sum += z;
        sum2 += std::norm(z);
    }
    const double N = static_cast<double>(samples);
    MeanEstimate e;
    e.mean = sum / N;
    e.std_error = std::sqrt(std::max(0.0, (sum2 / N - std::norm(e.mean)) / (N - 1.0)));
    return e;
}

std::vector<std::vector<MeanEstimate>> hermite_gram_mc(const std::vector<int> &orders, std::size_t samples,
                                                       std::uint64_t seed, double proposal_factor)
{
    for (int w : orders)
        check_order(w);
    const std::size_t K = orders.size();
    if (!(proposal_factor > 0.5) || samples < 2)
        throw InputError("hermite_gram_mc: invalid parameters");
    Rng rng(seed);
    const double shrink = 1.0 - 1.0 / proposal_factor;
    std::vector<std::vector<cplx>> sum(K, std::vector<cplx>(K, 0.0));
    std::vector<std::vector<double>> sum2(K, std::vector<double>(K, 0.0));
    std::vector<cplx> h(K);
    for (std::size_t n = 0; n < samples; ++n)
    {
        cplx x = rng.cgauss(proposal_factor);
        double w = proposal_factor * std::exp(-std::norm(x) * shrink);
        for (std::size_t a = 0; a < K; ++a)
            h[a] = hermite_poly(orders[a], x);
        for (std::size_t a = 0; a < K; ++a)
            for (std::size_t b = 0; b < K; ++b)
            {
                cplx z = w * h[a] * std::conj(h[b]);
                sum[a][b] += z;
                sum2[a][b] += std::norm(z);
            }
    }
    const double N = static_cast<double>(samples);
    std::vector<std::vector<MeanEstimate>> out(K, std::vector<MeanEstimate>(K));
    for (std::size_t a = 0; a < K; ++a)
        for (std::size_t b = 0; b < K; ++b)
        {
            out[a][b].mean = sum[a][b] / N;
            out[a][b].std_error = std::sqrt(std::max(0.0, (sum2[a][b] / N - std::norm(out[a][b].mean)) / (N - 1.0)));
        }
    return out;
}

bool HermiteKernels::memoryless() const
{
    for (const auto &m : taps)
        for (const auto &t : m)
            if (t.size() > 1)
                return false;
    return true;
}

bool HermiteKernels::linear() const
{
    for (const auto &m : taps)
        for (std::size_t q = 1; q < m.size(); ++q)
            for (auto v : m[q])
                if (v != 0.0)
                    return false;
    return true;
}

cplx HermiteKernels::coeff(std::size_t m, int order) const
{
    check_order(order);
    std::size_t q = static_cast<std::size_t>(order / 2);
    if (q >= taps.at(m).size())
        return 0.0;
    cplx s = 0.0;
    for (auto v : taps[m][q])
        s += v;
    return s;
}

cplx HermiteKernels::response(std::size_t m, int order, double f) const
{
    check_order(order);
    std::size_t q = static_cast<std::size_t>(order / 2);
    return q < taps.at(m).size() ? fir_response(taps[m][q], tap_period_s, f) : cplx(0.0);
}

HermiteKernels b_to_a(const MemoryPolynomialPA &pa, const std::vector<double> &sigma)
{
    if (pa.max_order() > kMaxSupportedOrder)
        throw InputError("b_to_a: orders above 9 are not supported");
    const std::size_t Q = pa.taps.size();
    std::size_t L = 1;
    for (const auto &t : pa.taps)
        L = std::max(L, t.size());

    HermiteKernels k;
    k.sigma = sigma;
    k.tap_period_s = pa.tap_period_s;
    k.taps.assign(sigma.size(), std::vector<std::vector<cplx>>(Q, std::vector<cplx>(L, 0.0)));
    for (std::size_t m = 0; m < sigma.size(); ++m)
    {
        if (!(sigma[m] > 0.0) || !std::isfinite(sigma[m]))
            throw InputError("b_to_a: sigma must be positive");
        const double s2 = sigma[m] * sigma[m];
        for (std::size_t q = 0; q < Q; ++q)
            for (std::size_t p = q; p < Q; ++p)
            {
                const double w = kernel_conversion_coeff(static_cast<int>(p), static_cast<int>(q)) *
                                 std::pow(s2, static_cast<double>(p - q));
                for (std::size_t l = 0; l < pa.taps[p].size(); ++l)
                    k.taps[m][q][l] += w * pa.taps[p][l];
            }
        if (pa.memoryless())
            for (auto &t : k.taps[m])
                t.resize(1);
    }
    return k;
}

MemoryPolynomialPA a_to_b(const HermiteKernels &k, std::size_t antenna)
{
    const auto &a = k.taps.at(antenna);
    const std::size_t Q = a.size();
    const double s2 = k.sigma.at(antenna) * k.sigma.at(antenna);
    MemoryPolynomialPA pa;
    pa.name = "from_hermite";
    pa.tap_period_s = k.tap_period_s;
    pa.taps.assign(Q, std::vector<cplx>(a.empty() ? 1 : a[0].size(), 0.0));
    // sum_q a_q sigma^{2q+1} H_{2q+1}(x/sigma) = sum_p [sum_q h_{q,p} sigma^{2(q-p)} a_q] x|x|^{2p}
    for (std::size_t p = 0; p < Q; ++p)
        for (std::size_t q = p; q < Q; ++q)
        {
            const double w = hermite_coeff(static_cast<int>(q), static_cast<int>(p)) * std::pow(s2, static_cast<double>(q - p));
            for (std::size_t l = 0; l < a[q].size(); ++l)
                pa.taps[p][l] += w * a[q][l];
        }
    return pa;
}

std::vector<cplx> apply_pa_time(const std::vector<cplx> &x, const MemoryPolynomialPA &pa, double sample_period_s)
{
    std::size_t L = 1;
    for (const auto &t : pa.taps)
        L = std::max(L, t.size());
    const std::size_t stride = tap_stride(pa.tap_period_s, sample_period_s, L);

    std::vector<cplx> y(x.size(), 0.0);
    if (pa.memoryless())
    {
        for (std::size_t n = 0; n < x.size(); ++n)
        {
            const double r2 = std::norm(x[n]);
            cplx g = 0.0;
            double pw = 1.0;
            for (const auto &t : pa.taps)
            {
                g += t[0] * pw;
                pw *= r2;
            }
            y[n] = g * x[n];
        }
        return y;
    }
    std::vector<cplx> z(x.size());
    for (std::size_t q = 0; q < pa.taps.size(); ++q)
    {
        for (std::size_t n = 0; n < x.size(); ++n)
            z[n] = x[n] * std::pow(std::norm(x[n]), static_cast<double>(q));
        fir_accumulate(z, pa.taps[q], stride, y);
    }
    return y;
}

std::vector<cplx> apply_pa_hermite(const std::vector<cplx> &x, const HermiteKernels &k, std::size_t m,
                                   double sample_period_s)
{
    const double sigma = k.sigma.at(m);
    if (!(sigma > 0.0))
        throw InputError("apply_pa_hermite: sigma must be positive");
    const auto &a = k.taps[m];
    const std::size_t stride = tap_stride(k.tap_period_s, sample_period_s, a.empty() ? 1 : a[0].size());
    std::vector<cplx> y(x.size(), 0.0), z(x.size());
    for (std::size_t q = 0; q < a.size(); ++q)
    {
        const int order = 2 * static_cast<int>(q) + 1;
        const double sp = std::pow(sigma, order);
        for (std::size_t n = 0; n < x.size(); ++n)
            z[n] = sp * hermite_poly(order, x[n] / sigma);
        fir_accumulate(z, a[q], stride, y);
    }
    return y;
}

std::vector<cplx> apply_linear_part(const std::vector<cplx> &x, const HermiteKernels &k, std::size_t m,
                                    double sample_period_s)
{
    const auto &a1 = k.taps.at(m).at(0);
    std::vector<cplx> y(x.size(), 0.0);
    fir_accumulate(x, a1, tap_stride(k.tap_period_s, sample_period_s, a1.size()), y);
    return y;
}

double one_db_compression(const MemoryPolynomialPA &pa)
{
    const cplx b1 = pa.coeff(1);
    if (std::abs(b1) == 0.0)
        throw InputError("one_db_compression: b1 is zero");
    auto gain = [&](double r) {
        cplx g = 0.0;
        double pw = 1.0;
        for (int order = 1; order <= pa.max_order(); order += 2)
        {
            g += pa.coeff(order) * pw;
            pw *= r * r;
        }
        return std::abs(g) / std::abs(b1);
    };
    // Amplitude scale at which the nonlinear terms become comparable to the linear one
    double scale = 0.0;
    for (int order = 3; order <= pa.max_order(); order += 2)
    {
        double c = std::abs(pa.coeff(order));
        if (c > 0.0)
        {
            double r = std::pow(std::abs(b1) / c, 1.0 / (order - 1));
            scale = scale == 0.0 ? r : std::min(scale, r);
        }
    }
    if (scale == 0.0)
        throw InputError("one_db_compression: linear amplifier has no compression point");

    const double target = std::pow(10.0, -1.0 / 20.0);
    const int steps = 200000;
    const double rmax = 100.0 * scale;
    double lo = 0.0;
    for (int i = 1; i <= steps; ++i)
    {
        double r = rmax * i / steps;
        if (gain(r) <= target)
        {
            double hi = r;
            while (hi - lo > 1e-13 * hi)
            {
                double mid = 0.5 * (lo + hi);
                (gain(mid) > target ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
        }
        lo = r;
    }
    throw InputError("one_db_compression: expansive polynomial, gain never drops by 1 dB");
}

ReciprocityFilter reciprocity_filter(const HermiteKernels &k, const FrequencyGrid &grid, double band_lo, double band_hi)
{
    ReciprocityFilter out;
    out.grid = grid;
    for (std::size_t m = 0; m < k.antennas(); ++m)
    {
        std::vector<cplx> A(grid.size()), inv(grid.size());
        double amax = 0.0, amin_band = INFINITY;
        for (std::size_t i = 0; i < grid.size(); ++i)
        {
            A[i] = k.response(m, 1, grid.at(i));
            amax = std::max(amax, std::norm(A[i]));
            if (grid.at(i) >= band_lo && grid.at(i) <= band_hi)
                amin_band = std::min(amin_band, std::norm(A[i]));
        }
        if (!(amax > 0.0) || amin_band <= 1e-24 * amax)
            throw InputError("reciprocity_filter: linear response vanishes in band for antenna " + std::to_string(m));
        const double eps = 1e-6 * amax;
        for (std::size_t i = 0; i < grid.size(); ++i)
            inv[i] = std::conj(A[i]) / (std::norm(A[i]) + eps);
        out.response.push_back(std::move(A));
        out.inverse.push_back(std::move(inv));
        out.epsilon.push_back(eps);
    }
    return out;
}

} // namespace arraydist
