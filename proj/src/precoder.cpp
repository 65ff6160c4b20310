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

#include "arraydist/precoder.hpp"

#include "arraydist/fft.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace arraydist
{

PrecoderSpec PrecoderSpec::parse(const std::string &name, double lambda)
{
    PrecoderSpec s;
    s.lambda = lambda;
    if (name == "MR" || name == "mr")
        s.kind = PrecoderKind::MaximumRatio;
    else if (name == "ZF" || name == "zf")
        s.kind = PrecoderKind::ZeroForcing;
    else if (name == "RZF" || name == "rzf")
    {
        s.kind = PrecoderKind::RegularizedZeroForcing;
        if (!(lambda > 0.0))
            throw InputError("precoder: RZF needs a positive regularization lambda");
    }
    else
        throw InputError("precoder: unknown kind '" + name + "' (expected MR, ZF or RZF)");
    return s;
}

std::string PrecoderSpec::name() const
{
    switch (kind)
    {
    case PrecoderKind::MaximumRatio:
        return "MR";
    case PrecoderKind::ZeroForcing:
        return "ZF";
    default:
        return "RZF";
    }
}

PowerAllocation PowerAllocation::equal(std::size_t K)
{
    return {std::vector<double>(K, 1.0 / static_cast<double>(K))};
}

void PowerAllocation::validate(std::size_t K) const
{
    if (xi.size() != K)
        throw InputError("power allocation: " + std::to_string(xi.size()) + " entries for " + std::to_string(K) + " users");
    for (double x : xi)
        if (!(x >= 0.0))
            throw InputError("power allocation: entries must be non-negative");
    if (total() > 1.0 + 1e-9)
        throw InputError("power allocation: entries sum to more than 1");
}

double PowerAllocation::total() const
{
    return std::accumulate(xi.begin(), xi.end(), 0.0);
}

double PowerAllocation::max() const
{
    return xi.empty() ? 0.0 : *std::max_element(xi.begin(), xi.end());
}

CMatrix precoder_direction(const CMatrix &H, const PrecoderSpec &spec)
{
    const auto K = H.rows(), M = H.cols();
    if (spec.kind == PrecoderKind::MaximumRatio)
        return H.adjoint();
    if (K > M)
        throw InputError("precoder: " + spec.name() + " needs K <= M (K = " + std::to_string(K) +
                         ", M = " + std::to_string(M) + ")");
    CMatrix G = H * H.adjoint();
    if (spec.kind == PrecoderKind::ZeroForcing)
    {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(G, Eigen::EigenvaluesOnly);
        const double lmax = es.eigenvalues().maxCoeff(), lmin = es.eigenvalues().minCoeff();
        if (!(lmin > 0.0) || lmax / lmin > 1e12)
            throw InputError("precoder: H H^H is singular (condition number above 1e12); use RZF instead of ZF");
    }
    else
        G += spec.lambda * CMatrix::Identity(K, K);
    return H.adjoint() * G.ldlt().solve(CMatrix::Identity(K, K));
}

double normalize_power(const std::vector<CMatrix> &directions, int N)
{
    if (directions.empty())
        throw InputError("normalize_power: no precoder samples");
    double sum = 0.0;
    std::size_t cols = 0;
    for (const auto &W : directions)
    {
        for (Eigen::Index k = 0; k < W.cols(); ++k)
            sum += W.col(k).squaredNorm();
        cols += static_cast<std::size_t>(W.cols());
    }
    const double mean = sum / static_cast<double>(cols);
    if (!(mean > 0.0))
        throw InputError("normalize_power: zero-energy precoder column");
    return 1.0 / std::sqrt(N * mean);
}

std::size_t PrecodingMatrix::antennas() const
{
    return static_cast<std::size_t>(W.empty() ? taps.at(0).rows() : W[0].rows());
}

std::size_t PrecodingMatrix::users() const
{
    return static_cast<std::size_t>(W.empty() ? taps.at(0).cols() : W[0].cols());
}

CMatrix PrecodingMatrix::at(double theta) const
{
    switch (form)
    {
    case Form::Flat:
        return W.at(0);
    case Form::Taps:
    {
        CMatrix w = CMatrix::Zero(taps[0].rows(), taps[0].cols());
        for (std::size_t l = 0; l < taps.size(); ++l)
            w += taps[l] * std::polar(1.0, -2.0 * kPi * theta * (first_tap + static_cast<int>(l)));
        return w;
    }
    default:
        throw InputError("precoder: per-subcarrier precoder has no single-carrier response");
    }
}

const CMatrix &PrecodingMatrix::subcarrier(std::size_t idx) const
{
    if (form == Form::Subcarrier)
        return W.at(idx);
    if (form == Form::Flat)
        return W.at(0);
    throw InputError("precoder: frequency-selective single-carrier precoder has no subcarrier matrices");
}

namespace
{
void check_columns(const std::vector<CMatrix> &dirs)
{
    for (const auto &W : dirs)
        for (Eigen::Index k = 0; k < W.cols(); ++k)
            if (W.col(k).squaredNorm() == 0.0)
                throw InputError("normalize_power: zero-energy column for user " + std::to_string(k));
}
} // namespace

PrecodingMatrix precode(const DiscreteChannel &ch, const PrecoderSpec &spec, int N, double alpha)
{
    PrecodingMatrix P;
    std::vector<CMatrix> dirs;
    if (!ch.subcarrier_gains.empty())
    {
        P.form = PrecodingMatrix::Form::Subcarrier;
        for (const auto &H : ch.subcarrier_gains)
            dirs.push_back(precoder_direction(H, spec));
        check_columns(dirs);
        P.alpha = alpha > 0.0 ? alpha : normalize_power(dirs, N);
        for (auto &W : dirs)
            P.W.push_back(P.alpha * W);
        return P;
    }
    if (ch.taps.empty())
        throw InputError("precode: empty channel");
    if (ch.taps.size() == 1)
    {
        P.form = PrecodingMatrix::Form::Flat;
        // A lone tap at index l0 is a pure delay; the precoder acts on the flat gain
        dirs.push_back(precoder_direction(ch.taps[0], spec));
        check_columns(dirs);
        P.alpha = alpha > 0.0 ? alpha : normalize_power(dirs, N);
        P.W.push_back(P.alpha * dirs[0]);
        return P;
    }

    P.form = PrecodingMatrix::Form::Taps;
    const std::size_t n = ch.n_theta > 0 ? ch.n_theta : fft_good_size(std::max<std::size_t>(128, 4 * ch.taps.size()));
    dirs.reserve(n);
    for (std::size_t q = 0; q < n; ++q)
        dirs.push_back(precoder_direction(ch.response(static_cast<double>(q) / n), spec));
    check_columns(dirs);
    P.alpha = alpha > 0.0 ? alpha : normalize_power(dirs, N);

    const auto M = dirs[0].rows(), K = dirs[0].cols();
    FftPlan inv(n, FftPlan::Direction::Inverse);
    std::vector<CMatrix> all(n, CMatrix::Zero(M, K));
    std::vector<cplx> buf(n);
    for (Eigen::Index m = 0; m < M; ++m)
        for (Eigen::Index k = 0; k < K; ++k)
        {
            for (std::size_t q = 0; q < n; ++q)
                buf[q] = dirs[q](m, k);
            inv.execute(buf);
            for (std::size_t l = 0; l < n; ++l)
                all[l](m, k) = P.alpha * buf[l] / static_cast<double>(n);
        }
    // Taps l = -n/2 .. n/2-1; trim both ends while a tap holds less than 1e-6 of the total energy
    const long h = static_cast<long>(n / 2);
    auto tap = [&](long l) -> const CMatrix & {
        return all[static_cast<std::size_t>((l + static_cast<long>(n)) % static_cast<long>(n))];
    };
    double total = 0.0;
    for (const auto &t : all)
        total += t.squaredNorm();
    long lo = -h, hi = static_cast<long>(n) - h - 1;
    while (lo < hi && tap(lo).squaredNorm() < 1e-6 * total)
        ++lo;
    while (hi > lo && tap(hi).squaredNorm() < 1e-6 * total)
        --hi;
    P.first_tap = static_cast<int>(lo);
    for (long l = lo; l <= hi; ++l)
        P.taps.push_back(tap(l));
    return P;
}

std::vector<CMatrix> sample_directions(const DiscreteChannel &ch, const PrecoderSpec &spec, std::size_t points)
{
    std::vector<CMatrix> dirs;
    if (!ch.subcarrier_gains.empty())
    {
        const std::size_t n = ch.subcarrier_gains.size();
        const std::size_t step = std::max<std::size_t>(1, n / points);
        for (std::size_t i = 0; i < n; i += step)
            dirs.push_back(precoder_direction(ch.subcarrier_gains[i], spec));
    }
    else if (ch.taps.size() == 1)
        dirs.push_back(precoder_direction(ch.taps[0], spec));
    else
        for (std::size_t q = 0; q < points; ++q)
            dirs.push_back(precoder_direction(ch.response((q + 0.5) / points), spec));
    return dirs;
}

double ensemble_alpha(const std::function<DiscreteChannel(std::size_t)> &draw, const PrecoderSpec &spec, int N,
                      std::size_t realizations)
{
    if (realizations == 0)
        throw InputError("ensemble_alpha: at least one realization required");
    std::vector<CMatrix> all;
    for (std::size_t r = 0; r < realizations; ++r)
    {
        auto d = sample_directions(draw(r), spec);
        all.insert(all.end(), std::make_move_iterator(d.begin()), std::make_move_iterator(d.end()));
    }
    return normalize_power(all, N);
}

CMatrix digital_psd(const CMatrix &W, const std::vector<double> &xi)
{
    if (static_cast<std::size_t>(W.cols()) != xi.size())
        throw InputError("digital_psd: allocation size differs from user count");
    Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(xi.data(), static_cast<Eigen::Index>(xi.size()));
    CMatrix S = W * d.asDiagonal() * W.adjoint();
    return 0.5 * (S + S.adjoint());
}

SpectralMatrix analog_psd(const PrecodingMatrix &P, const PowerAllocation &alloc, const PulseBank &pulses,
                          const FrequencyGrid &grid, const Schedule &schedule)
{
    const std::size_t M = P.antennas(), K = P.users();
    alloc.validate(K);
    const double T = pulses.T;
    const std::size_t n = grid.size();

    if (pulses.family == PulseFamily::RootRaisedCosine)
    {
        if (P.form == PrecodingMatrix::Form::Subcarrier)
            throw InputError("analog_psd: per-subcarrier precoder with single-carrier pulses");
        std::vector<double> shape = pulses.energy_on_grid(0, grid);
        for (double &s : shape)
            s /= T;
        if (P.form == PrecodingMatrix::Form::Flat)
            return SpectralMatrix::from_terms(grid, M, {{shape, digital_psd(P.W[0], alloc.xi)}});
        std::vector<CMatrix> mats(n, CMatrix::Zero(M, M));
        for (std::size_t i = 0; i < n; ++i)
            if (shape[i] > 0.0)
                mats[i] = shape[i] * digital_psd(P.at(grid.at(i) * T), alloc.xi);
        return SpectralMatrix::from_dense(grid, std::move(mats));
    }

    if (grid.df() > 0.5 * pulses.f0)
        throw InputError("analog_psd: frequency grid is coarser than half the subcarrier spacing");
    if (!schedule.empty() && schedule.size() != pulses.count())
        throw InputError("analog_psd: schedule must list every subcarrier");

    // Subcarriers sharing the same W_nu D_nu W_nu^H collapse into one separable term
    struct Group
    {
        CMatrix C;
        std::vector<double> shape;
    };
    std::vector<Group> groups;
    const double scale = 1.0 / (pulses.N * T);
    for (std::size_t idx = 0; idx < pulses.count(); ++idx)
    {
        std::vector<double> xi = alloc.xi;
        if (!schedule.empty())
        {
            if (schedule[idx].size() != K)
                throw InputError("analog_psd: schedule row size differs from user count");
            for (std::size_t k = 0; k < K; ++k)
                if (!schedule[idx][k])
                    xi[k] = 0.0;
        }
        if (std::all_of(xi.begin(), xi.end(), [](double x) { return x == 0.0; }))
            continue;
        CMatrix C = digital_psd(P.subcarrier(idx), xi);
        Group *g = nullptr;
        for (auto &cand : groups)
            if ((cand.C - C).norm() <= 1e-12 * std::max(1e-300, C.norm()))
            {
                g = &cand;
                break;
            }
        if (!g)
        {
            groups.push_back({C, std::vector<double>(n, 0.0)});
            g = &groups.back();
        }
        for (std::size_t i = 0; i < n; ++i)
            g->shape[i] += scale * pulses.energy(idx, grid.at(i));
    }
    std::vector<SpectralMatrix::Term> terms;
    for (auto &g : groups)
        terms.push_back({std::move(g.shape), std::move(g.C)});
    auto S = SpectralMatrix::from_terms(grid, M, std::move(terms));
    return S.terms().size() > 64 ? S.densified() : S;
}

} // namespace arraydist
