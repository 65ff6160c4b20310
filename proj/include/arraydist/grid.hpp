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

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace arraydist
{
using cplx = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;

// Raised for invalid inputs (precondition violations). The message names the offending field.
class InputError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

// Uniform frequency grid, symmetric about 0, odd number of points, f_i = (i - h) * df
class FrequencyGrid
{
  public:
    FrequencyGrid() = default;
    FrequencyGrid(double df, std::size_t half_points);

    std::size_t size() const { return 2 * half_ + 1; }
    std::size_t half() const { return half_; }
    std::size_t center() const { return half_; }
    double df() const { return df_; }
    double f_min() const { return -static_cast<double>(half_) * df_; }
    double f_max() const { return static_cast<double>(half_) * df_; }
    double at(std::size_t i) const { return (static_cast<double>(i) - static_cast<double>(half_)) * df_; }
    std::vector<double> frequencies() const;

    // Index of the grid point closest to f (clamped)
    std::size_t nearest(double f) const;

    // Weight of each grid cell [f_i - df/2, f_i + df/2] inside [lo, hi]; rectangle-rule band integration
    std::vector<double> band_weights(double lo, double hi) const;

    bool operator==(const FrequencyGrid &o) const { return half_ == o.half_ && df_ == o.df_; }
    bool operator!=(const FrequencyGrid &o) const { return !(*this == o); }

  private:
    double df_ = 1.0;
    std::size_t half_ = 0;
};

// Grid over [-order*B/2, order*B/2] with spacing B/points_per_B
FrequencyGrid make_freq_grid(double bandwidth, int order, int points_per_B);

// Real, non-negative spectrum sampled on a grid (W/Hz)
struct ScalarSpectrum
{
    FrequencyGrid grid;
    std::vector<double> values;

    double integral() const;
    double integral(double lo, double hi) const;
    double peak() const;
};

void require_same_grid(const FrequencyGrid &a, const FrequencyGrid &b, const char *what);

} // namespace arraydist
