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

#include "arraydist/fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace arraydist
{

namespace
{
std::mutex &planner_mutex()
{
    static std::mutex m;
    return m;
}
} // namespace

struct FftPlan::Impl
{
    fftw_plan plan = nullptr;
};

FftPlan::FftPlan(std::size_t n, Direction dir) : n_(n), dir_(dir), impl_(std::make_unique<Impl>())
{
    if (n == 0)
        throw InputError("FftPlan: zero length");
    std::vector<cplx> tmp(n);
    auto *p = reinterpret_cast<fftw_complex *>(tmp.data());
    std::lock_guard<std::mutex> lock(planner_mutex());
    impl_->plan = fftw_plan_dft_1d(static_cast<int>(n), p, p, dir == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
}

FftPlan::~FftPlan()
{
    if (impl_ && impl_->plan)
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(impl_->plan);
    }
}

void FftPlan::execute(const cplx *in, cplx *out) const
{
    // The plan is in-place and unaligned, so any buffer can be used
    if (in != out)
        std::copy(in, in + n_, out);
    auto *o = reinterpret_cast<fftw_complex *>(out);
    fftw_execute_dft(impl_->plan, o, o);
}

std::size_t fft_good_size(std::size_t n)
{
    if (n <= 1)
        return 1;
    for (std::size_t m = n;; ++m)
    {
        std::size_t r = m;
        for (std::size_t p : {2u, 3u, 5u})
            while (r % p == 0)
                r /= p;
        if (r == 1)
            return m;
    }
}

GridConvolver::GridConvolver(std::size_t n_points) : n_(n_points), L_(fft_good_size(2 * n_points - 1))
{
    fwd_ = std::make_shared<FftPlan>(L_, FftPlan::Direction::Forward);
    inv_ = std::make_shared<FftPlan>(L_, FftPlan::Direction::Inverse);
}

std::vector<cplx> GridConvolver::convolve(const std::vector<cplx> &a, const std::vector<cplx> &b, double df) const
{
    if (a.size() != n_ || b.size() != n_)
        throw InputError("convolve: length mismatch");
    std::vector<cplx> A(L_, 0.0), B(L_, 0.0);
    std::copy(a.begin(), a.end(), A.begin());
    std::copy(b.begin(), b.end(), B.begin());
    fwd_->execute(A);
    fwd_->execute(B);
    for (std::size_t k = 0; k < L_; ++k)
        A[k] *= B[k];
    inv_->execute(A);
    const std::size_t h = (n_ - 1) / 2;
    const double scale = df / static_cast<double>(L_);
    std::vector<cplx> out(n_);
    for (std::size_t i = 0; i < n_; ++i)
        out[i] = A[i + h] * scale;
    return out;
}

std::vector<double> GridConvolver::convolve(const std::vector<double> &a, const std::vector<double> &b, double df) const
{
    std::vector<cplx> ac(a.begin(), a.end()), bc(b.begin(), b.end());
    auto c = convolve(ac, bc, df);
    std::vector<double> out(n_);
    for (std::size_t i = 0; i < n_; ++i)
        out[i] = c[i].real();
    return out;
}

std::vector<cplx> convolve_direct(const std::vector<cplx> &a, const std::vector<cplx> &b, double df)
{
    const std::size_t n = a.size();
    if (b.size() != n || n % 2 == 0)
        throw InputError("convolve_direct: lengths must match and be odd");
    const long h = static_cast<long>(n - 1) / 2;
    std::vector<cplx> out(n, 0.0);
    for (long i = 0; i < static_cast<long>(n); ++i)
    {
        // f_i = sum_j a(f_j) b(f_i - f_j): index of f_i - f_j is i - j + h
        cplx s = 0.0;
        for (long j = 0; j < static_cast<long>(n); ++j)
        {
            long k = i - j + h;
            if (k >= 0 && k < static_cast<long>(n))
                s += a[j] * b[k];
        }
        out[i] = s * df;
    }
    return out;
}

} // namespace arraydist
