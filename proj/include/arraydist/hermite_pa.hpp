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

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace arraydist
{

// Memory polynomial y(t) = sum over odd w of (b_w * (x|x|^{w-1}))(t). taps[q] is the FIR kernel of
// order 2q+1 with spacing tap_period_s; a memoryless amplifier has one tap per order.
struct MemoryPolynomialPA
{
    std::string name = "unnamed";
    int version = 1;
    double tap_period_s = 0.0;
    std::vector<std::vector<cplx>> taps;

    int max_order() const { return 2 * static_cast<int>(taps.size()) - 1; }
    bool memoryless() const;
    // Sum of taps (zero-frequency gain) of the given odd order; 0 beyond max_order
    cplx coeff(int order) const;
    cplx response(int order, double f) const;

    static MemoryPolynomialPA memoryless_pa(const std::vector<cplx> &b, std::string name = "memoryless");
};

MemoryPolynomialPA parse_pa(std::istream &in);
MemoryPolynomialPA load_pa(const std::string &path);
void write_pa(std::ostream &out, const MemoryPolynomialPA &pa);

// Complex Ito-Hermite polynomial of odd order w
cplx hermite_poly(int order, cplx x);
// E|H_w(X)|^2 for unit complex Gaussian X: ((w+1)/2)! ((w-1)/2)!
double hermite_norm(int order);
// Coefficient of x|x|^{2p} in H_{2q+1}(x)
double hermite_coeff(int q, int p);
// Weight of b_{2p+1} sigma^{2(p-q)} in a_{2q+1}: C(p,q) (p+1)!/(q+1)!
double kernel_conversion_coeff(int p, int q);

constexpr int kMaxSupportedOrder = 9;

struct MeanEstimate
{
    cplx mean;
    double std_error = 0.0;
};

// E[g(X)] for X ~ CN(0, variance), importance-sampled from CN(0, proposal_factor * variance).
// High-order polynomial moments are dominated by rarely drawn tails; the wider proposal keeps the
// estimator variance small and its standard error meaningful.
MeanEstimate gaussian_expectation(const std::function<cplx(cplx)> &g, double variance, std::size_t samples,
                                  std::uint64_t seed, double proposal_factor = 4.0);

// Gram matrix E[H_a(X) conj(H_b(X))], X unit complex Gaussian, same estimator, one pass
std::vector<std::vector<MeanEstimate>> hermite_gram_mc(const std::vector<int> &orders, std::size_t samples,
                                                       std::uint64_t seed, double proposal_factor = 4.0);

// Orthogonalized kernels, one set per antenna: y_m = sum_w a_wm * sigma_m^w H_w(x_m/sigma_m)
struct HermiteKernels
{
    std::vector<double> sigma;
    std::vector<std::vector<std::vector<cplx>>> taps; // [m][q][tap]
    double tap_period_s = 0.0;

    std::size_t antennas() const { return sigma.size(); }
    int max_order() const { return taps.empty() ? 1 : 2 * static_cast<int>(taps[0].size()) - 1; }
    bool memoryless() const;
    // True when every order above one vanishes
    bool linear() const;
    cplx coeff(std::size_t m, int order) const;
    cplx response(std::size_t m, int order, double f) const;
};

HermiteKernels b_to_a(const MemoryPolynomialPA &pa, const std::vector<double> &sigma);
// Inverse map for one antenna
MemoryPolynomialPA a_to_b(const HermiteKernels &k, std::size_t antenna);

// Raw polynomial form on samples spaced sample_period_s
std::vector<cplx> apply_pa_time(const std::vector<cplx> &x, const MemoryPolynomialPA &pa, double sample_period_s);
// Hermite form for antenna m
std::vector<cplx> apply_pa_hermite(const std::vector<cplx> &x, const HermiteKernels &k, std::size_t m,
                                   double sample_period_s);
// Linear part a_1m * x
std::vector<cplx> apply_linear_part(const std::vector<cplx> &x, const HermiteKernels &k, std::size_t m,
                                    double sample_period_s);

// Input amplitude where |sum_w b_w r^{w-1}| first drops 1 dB below |b_1|
double one_db_compression(const MemoryPolynomialPA &pa);

struct ReciprocityFilter
{
    FrequencyGrid grid;
    std::vector<std::vector<cplx>> response; // A_1m(f)
    std::vector<std::vector<cplx>> inverse;  // conj(A)/(|A|^2 + eps)
    std::vector<double> epsilon;
};

ReciprocityFilter reciprocity_filter(const HermiteKernels &k, const FrequencyGrid &grid, double band_lo, double band_hi);

} // namespace arraydist
