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

#include <Eigen/Dense>

#include <vector>

namespace arraydist
{
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// M x M Hermitian cross-spectral density on a frequency grid.
//
// Stored as a sum of separable terms shape(f) * C (real shape, constant Hermitian C) plus an
// optional dense part holding one matrix per grid point. Frequency-flat precoding keeps every
// derived spectrum separable, which makes large arrays cheap; anything else is densified.
class SpectralMatrix
{
  public:
    struct Term
    {
        std::vector<double> shape;
        CMatrix coeff;
    };

    SpectralMatrix() = default;
    SpectralMatrix(FrequencyGrid grid, std::size_t dim);

    static SpectralMatrix from_terms(FrequencyGrid grid, std::size_t dim, std::vector<Term> terms);
    static SpectralMatrix from_dense(FrequencyGrid grid, std::vector<CMatrix> mats);

    const FrequencyGrid &grid() const { return grid_; }
    std::size_t dim() const { return dim_; }
    std::size_t size() const { return grid_.size(); }

    bool has_dense() const { return !dense_.empty(); }
    const std::vector<Term> &terms() const { return terms_; }
    const std::vector<CMatrix> &dense() const { return dense_; }

    CMatrix at(std::size_t i) const;
    cplx entry(std::size_t i, std::size_t a, std::size_t b) const;
    std::vector<cplx> entry_series(std::size_t a, std::size_t b) const;
    std::vector<double> diagonal(std::size_t m) const;
    ScalarSpectrum diagonal_spectrum(std::size_t m) const;
    ScalarSpectrum trace() const;

    // Real value of v^H S(f_i) v
    double quadratic(std::size_t i, const CVector &v) const;
    // v^H S(f) v on the whole grid for a frequency-independent v
    ScalarSpectrum quadratic_spectrum(const CVector &v) const;
    // v(f)^H S(f) v(f) with one vector per grid point
    ScalarSpectrum quadratic_spectrum(const std::vector<CVector> &v) const;

    // Per-antenna integrated power (diagonal integrals)
    std::vector<double> antenna_powers() const;

    SpectralMatrix densified() const;
    SpectralMatrix scaled(double c) const;
    // Entry (m,m') multiplied by a_m conj(a_m'); a constant over frequency
    SpectralMatrix sandwich(const CVector &a) const;
    // Same with one vector per grid point (always dense)
    SpectralMatrix sandwich(const std::vector<CVector> &a) const;

    void add_term(std::vector<double> shape, CMatrix coeff);
    SpectralMatrix &operator+=(const SpectralMatrix &o);

    // Merge separable terms with equal coefficients (relative tolerance)
    void compact(double rel_tol = 1e-12);

    // Largest Hermitian deviation |S - S^H| / |S| over the grid
    double hermitian_defect() const;

  private:
    FrequencyGrid grid_;
    std::size_t dim_ = 0;
    std::vector<Term> terms_;
    std::vector<CMatrix> dense_;
};

SpectralMatrix operator+(SpectralMatrix a, const SpectralMatrix &b);

struct ConvOptions
{
    std::size_t max_terms = 256; // separable products above this count are densified
    bool force_dense = false;
};

// Entrywise convolution: result_{mm'}(f) = sum_j A_{mm'}(f_j) B_{mm'}(f - f_j) df, cropped to the grid
SpectralMatrix elementwise_conv(const SpectralMatrix &A, const SpectralMatrix &B, const ConvOptions &opt = {});

// Entry (m,m') at f becomes conj(A_{mm'}(-f))
SpectralMatrix conj_reflect(const SpectralMatrix &A);

} // namespace arraydist
