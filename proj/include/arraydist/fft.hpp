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

#include <memory>
#include <vector>

namespace arraydist
{

// Thin RAII wrapper over an FFTW complex plan of fixed length. Execution is thread-safe on
// distinct buffers; planning is serialized internally.
class FftPlan
{
  public:
    enum class Direction
    {
        Forward,
        Inverse
    };

    FftPlan(std::size_t n, Direction dir);
    ~FftPlan();
    FftPlan(const FftPlan &) = delete;
    FftPlan &operator=(const FftPlan &) = delete;

    std::size_t size() const { return n_; }

    // Unnormalized transform; in and out may alias
    void execute(const cplx *in, cplx *out) const;
    void execute(std::vector<cplx> &data) const { execute(data.data(), data.data()); }

  private:
    std::size_t n_;
    Direction dir_;
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Smallest 2^a 3^b 5^c >= n
std::size_t fft_good_size(std::size_t n);

// Linear convolution of two equal-length sequences on the same symmetric grid, scaled by df and
// cropped back to the grid (both inputs centered on f = 0).
class GridConvolver
{
  public:
    explicit GridConvolver(std::size_t n_points);

    std::vector<cplx> convolve(const std::vector<cplx> &a, const std::vector<cplx> &b, double df) const;
    std::vector<double> convolve(const std::vector<double> &a, const std::vector<double> &b, double df) const;

  private:
    std::size_t n_;
    std::size_t L_;
    std::shared_ptr<FftPlan> fwd_;
    std::shared_ptr<FftPlan> inv_;
};

// Direct O(n^2) reference of the same operation (test oracle and small sizes)
std::vector<cplx> convolve_direct(const std::vector<cplx> &a, const std::vector<cplx> &b, double df);

} // namespace arraydist
