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

#include "arraydist/grid.hpp"

#include <algorithm>
#include <cmath>

namespace arraydist
{

FrequencyGrid::FrequencyGrid(double df, std::size_t half_points)
    : df_(df), half_(half_points)
{
    if (!(df > 0.0) || !std::isfinite(df))
        throw InputError("grid: df must be positive and finite");
}

std::vector<double> FrequencyGrid::frequencies() const
{
    std::vector<double> f(size());
    for (std::size_t i = 0; i < f.size(); ++i)
        f[i] = at(i);
    return f;
}

std::size_t FrequencyGrid::nearest(double f) const
{
    double k = std::round(f / df_) + static_cast<double>(half_);
    if (k < 0.0)
        return 0;
    if (k > static_cast<double>(size() - 1))
        return size() - 1;
    return static_cast<std::size_t>(k);
}

std::vector<double> FrequencyGrid::band_weights(double lo, double hi) const
{
    std::vector<double> w(size(), 0.0);
    for (std::size_t i = 0; i < size(); ++i)
    {
        double a = std::max(lo, at(i) - 0.5 * df_);
        double b = std::min(hi, at(i) + 0.5 * df_);
        if (b > a)
            w[i] = b - a;
    }
    return w;
}

FrequencyGrid make_freq_grid(double bandwidth, int order, int points_per_B)
{
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
        throw InputError("make_freq_grid: bandwidth must be positive");
    if (order < 1 || order % 2 == 0)
        throw InputError("make_freq_grid: order must be odd and >= 1");
    if (points_per_B < 16)
        throw InputError("make_freq_grid: points_per_B must be >= 16");

    double df = bandwidth / points_per_B;
    auto half = static_cast<std::size_t>(std::ceil(order * points_per_B / 2.0 - 1e-9));
    return FrequencyGrid(df, half);
}

double ScalarSpectrum::integral() const
{
    double s = 0.0;
    for (double v : values)
        s += v;
    return s * grid.df();
}

double ScalarSpectrum::integral(double lo, double hi) const
{
    auto w = grid.band_weights(lo, hi);
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
        s += w[i] * values[i];
    return s;
}

double ScalarSpectrum::peak() const
{
    return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

void require_same_grid(const FrequencyGrid &a, const FrequencyGrid &b, const char *what)
{
    if (a != b)
        throw InputError(std::string(what) + ": grid mismatch");
}

} // namespace arraydist
