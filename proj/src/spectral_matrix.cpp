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

#include "arraydist/spectral_matrix.hpp"

#include "arraydist/fft.hpp"

#include <cmath>

namespace arraydist
{

SpectralMatrix::SpectralMatrix(FrequencyGrid grid, std::size_t dim) : grid_(grid), dim_(dim) {}

SpectralMatrix SpectralMatrix::from_terms(FrequencyGrid grid, std::size_t dim, std::vector<Term> terms)
{
    SpectralMatrix s(grid, dim);
    for (auto &t : terms)
        s.add_term(std::move(t.shape), std::move(t.coeff));
    return s;
}

SpectralMatrix SpectralMatrix::from_dense(FrequencyGrid grid, std::vector<CMatrix> mats)
{
    if (mats.size() != grid.size())
        throw InputError("SpectralMatrix: one matrix per grid point required");
    std::size_t dim = mats.empty() ? 0 : static_cast<std::size_t>(mats[0].rows());
    for (const auto &m : mats)
        if (static_cast<std::size_t>(m.rows()) != dim || static_cast<std::size_t>(m.cols()) != dim)
            throw InputError("SpectralMatrix: matrices must be square with equal size");
    SpectralMatrix s(grid, dim);
    s.dense_ = std::move(mats);
    return s;
}

void SpectralMatrix::add_term(std::vector<double> shape, CMatrix coeff)
{
    if (shape.size() != grid_.size())
        throw InputError("SpectralMatrix: term shape length differs from grid");
    if (static_cast<std::size_t>(coeff.rows()) != dim_ || static_cast<std::size_t>(coeff.cols()) != dim_)
        throw InputError("SpectralMatrix: term coefficient has wrong size");
    terms_.push_back({std::move(shape), std::move(coeff)});
}

CMatrix SpectralMatrix::at(std::size_t i) const
{
    CMatrix m = has_dense() ? dense_[i] : CMatrix::Zero(dim_, dim_);
    for (const auto &t : terms_)
        if (t.shape[i] != 0.0)
            m += t.shape[i] * t.coeff;
    return m;
}

cplx SpectralMatrix::entry(std::size_t i, std::size_t a, std::size_t b) const
{
    cplx v = has_dense() ? dense_[i](a, b) : cplx(0.0);
    for (const auto &t : terms_)
        v += t.shape[i] * t.coeff(a, b);
    return v;
}

std::vector<cplx> SpectralMatrix::entry_series(std::size_t a, std::size_t b) const
{
    std::vector<cplx> s(size());
    for (std::size_t i = 0; i < size(); ++i)
        s[i] = entry(i, a, b);
    return s;
}

std::vector<double> SpectralMatrix::diagonal(std::size_t m) const
{
    std::vector<double> d(size());
    for (std::size_t i = 0; i < size(); ++i)
        d[i] = entry(i, m, m).real();
    return d;
}

ScalarSpectrum SpectralMatrix::diagonal_spectrum(std::size_t m) const
{
    return {grid_, diagonal(m)};
}

ScalarSpectrum SpectralMatrix::trace() const
{
    std::vector<double> tr(size(), 0.0);
    for (const auto &t : terms_)
    {
        double c = t.coeff.trace().real();
        for (std::size_t i = 0; i < size(); ++i)
            tr[i] += c * t.shape[i];
    }
    if (has_dense())
        for (std::size_t i = 0; i < size(); ++i)
            tr[i] += dense_[i].trace().real();
    return {grid_, tr};
}

double SpectralMatrix::quadratic(std::size_t i, const CVector &v) const
{
    return (v.adjoint() * at(i) * v)(0, 0).real();
}

ScalarSpectrum SpectralMatrix::quadratic_spectrum(const CVector &v) const
{
    std::vector<double> out(size(), 0.0);
    for (const auto &t : terms_)
    {
        double q = (v.adjoint() * t.coeff * v)(0, 0).real();
        for (std::size_t i = 0; i < size(); ++i)
            out[i] += q * t.shape[i];
    }
    if (has_dense())
        for (std::size_t i = 0; i < size(); ++i)
            out[i] += (v.adjoint() * dense_[i] * v)(0, 0).real();
    return {grid_, out};
}

ScalarSpectrum SpectralMatrix::quadratic_spectrum(const std::vector<CVector> &v) const
{
    if (v.size() != size())
        throw InputError("quadratic_spectrum: one vector per grid point required");
    std::vector<double> out(size());
    for (std::size_t i = 0; i < size(); ++i)
        out[i] = quadratic(i, v[i]);
    return {grid_, out};
}

std::vector<double> SpectralMatrix::antenna_powers() const
{
    std::vector<double> p(dim_);
    for (std::size_t m = 0; m < dim_; ++m)
        p[m] = diagonal_spectrum(m).integral();
    return p;
}

SpectralMatrix SpectralMatrix::densified() const
{
    std::vector<CMatrix> mats(size());
    for (std::size_t i = 0; i < size(); ++i)
        mats[i] = at(i);
    auto s = from_dense(grid_, std::move(mats));
    s.dim_ = dim_;
    return s;
}

SpectralMatrix SpectralMatrix::scaled(double c) const
{
    SpectralMatrix s = *this;
    for (auto &t : s.terms_)
        t.coeff *= c;
    for (auto &m : s.dense_)
        m *= c;
    return s;
}

SpectralMatrix SpectralMatrix::sandwich(const CVector &a) const
{
    if (static_cast<std::size_t>(a.size()) != dim_)
        throw InputError("sandwich: vector length differs from matrix size");
    const CMatrix outer = a * a.adjoint();
    SpectralMatrix s = *this;
    for (auto &t : s.terms_)
        t.coeff = t.coeff.cwiseProduct(outer);
    for (auto &m : s.dense_)
        m = m.cwiseProduct(outer);
    return s;
}

SpectralMatrix SpectralMatrix::sandwich(const std::vector<CVector> &a) const
{
    if (a.size() != size())
        throw InputError("sandwich: one vector per grid point required");
    std::vector<CMatrix> mats(size());
    for (std::size_t i = 0; i < size(); ++i)
        mats[i] = at(i).cwiseProduct(a[i] * a[i].adjoint());
    return from_dense(grid_, std::move(mats));
}

SpectralMatrix &SpectralMatrix::operator+=(const SpectralMatrix &o)
{
    if (dim_ == 0 && terms_.empty() && dense_.empty())
    {
        *this = o;
        return *this;
    }
    require_same_grid(grid_, o.grid_, "SpectralMatrix +=");
    if (dim_ != o.dim_)
        throw InputError("SpectralMatrix +=: dimension mismatch");
    for (const auto &t : o.terms_)
        terms_.push_back(t);
    if (o.has_dense())
    {
        if (!has_dense())
            dense_ = o.dense_;
        else
            for (std::size_t i = 0; i < size(); ++i)
                dense_[i] += o.dense_[i];
    }
    compact();
    return *this;
}

SpectralMatrix operator+(SpectralMatrix a, const SpectralMatrix &b)
{
    a += b;
    return a;
}

void SpectralMatrix::compact(double rel_tol)
{
    std::vector<Term> merged;
    for (auto &t : terms_)
    {
        bool all_zero = true;
        for (double v : t.shape)
            if (v != 0.0)
            {
                all_zero = false;
                break;
            }
        double cn = t.coeff.norm();
        if (all_zero || cn == 0.0)
            continue;
        bool done = false;
        for (auto &m : merged)
        {
            if ((m.coeff - t.coeff).norm() <= rel_tol * std::max(cn, m.coeff.norm()))
            {
                for (std::size_t i = 0; i < t.shape.size(); ++i)
                    m.shape[i] += t.shape[i];
                done = true;
                break;
            }
        }
        if (!done)
            merged.push_back(std::move(t));
    }
    terms_ = std::move(merged);
}

double SpectralMatrix::hermitian_defect() const
{
    double worst = 0.0;
    for (std::size_t i = 0; i < size(); ++i)
    {
        CMatrix m = at(i);
        double n = m.norm();
        if (n > 0.0)
            worst = std::max(worst, (m - m.adjoint()).norm() / n);
    }
    return worst;
}

namespace
{

SpectralMatrix dense_conv(const SpectralMatrix &A, const SpectralMatrix &B)
{
    const std::size_t n = A.size(), M = A.dim();
    const double df = A.grid().df();
    GridConvolver conv(n);
    std::vector<CMatrix> out(n, CMatrix::Zero(M, M));
    // Hermitian inputs give a Hermitian result: compute the upper triangle, mirror the rest
    for (std::size_t a = 0; a < M; ++a)
        for (std::size_t b = a; b < M; ++b)
        {
            auto c = conv.convolve(A.entry_series(a, b), B.entry_series(a, b), df);
            for (std::size_t i = 0; i < n; ++i)
            {
                if (a == b)
                    out[i](a, a) = c[i].real();
                else
                {
                    out[i](a, b) = c[i];
                    out[i](b, a) = std::conj(c[i]);
                }
            }
        }
    return SpectralMatrix::from_dense(A.grid(), std::move(out));
}

} // namespace

SpectralMatrix elementwise_conv(const SpectralMatrix &A, const SpectralMatrix &B, const ConvOptions &opt)
{
    require_same_grid(A.grid(), B.grid(), "elementwise_conv");
    if (A.dim() != B.dim())
        throw InputError("elementwise_conv: dimension mismatch");

    const bool separable = !A.has_dense() && !B.has_dense() && !opt.force_dense &&
                           A.terms().size() * B.terms().size() <= opt.max_terms;
    if (!separable)
        return dense_conv(A, B);

    const std::size_t n = A.size();
    const double df = A.grid().df();
    GridConvolver conv(n);
    SpectralMatrix out(A.grid(), A.dim());
    for (const auto &ta : A.terms())
        for (const auto &tb : B.terms())
        {
            auto shape = conv.convolve(ta.shape, tb.shape, df);
            out.add_term(std::move(shape), ta.coeff.cwiseProduct(tb.coeff));
        }
    out.compact();
    return out;
}

SpectralMatrix conj_reflect(const SpectralMatrix &A)
{
    const std::size_t n = A.size();
    SpectralMatrix out(A.grid(), A.dim());
    for (const auto &t : A.terms())
    {
        std::vector<double> s(t.shape.rbegin(), t.shape.rend());
        out.add_term(std::move(s), t.coeff.conjugate());
    }
    if (A.has_dense())
    {
        std::vector<CMatrix> mats(n);
        for (std::size_t i = 0; i < n; ++i)
            mats[i] = A.dense()[n - 1 - i].conjugate();
        out += SpectralMatrix::from_dense(A.grid(), std::move(mats));
    }
    return out;
}

} // namespace arraydist
