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

#include "arraydist/hermitian_eig.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace arraydist
{

namespace
{

double off_norm(const CMatrix &A)
{
    double s = 0.0;
    for (Eigen::Index j = 0; j < A.cols(); ++j)
        for (Eigen::Index i = 0; i < A.rows(); ++i)
            if (i != j)
                s += std::norm(A(i, j));
    return std::sqrt(s);
}

void check_hermitian(const CMatrix &A)
{
    if (A.rows() != A.cols())
        throw InputError("hermitian_eig: matrix not square");
    double n = A.norm();
    if (n > 0.0 && (A - A.adjoint()).norm() > 1e-10 * n)
        throw InputError("hermitian_eig: matrix not Hermitian");
}

} // namespace

EigenDecomposition hermitian_eig(const CMatrix &A_in, double tol)
{
    check_hermitian(A_in);
    const Eigen::Index n = A_in.rows();
    CMatrix A = 0.5 * (A_in + A_in.adjoint());
    CMatrix V = CMatrix::Identity(n, n);
    const double scale = A.norm();

    EigenDecomposition out;
    if (scale > 0.0)
    {
        for (int sweep = 0; sweep < 100 && off_norm(A) > tol * scale; ++sweep)
        {
            out.sweeps = sweep + 1;
            for (Eigen::Index p = 0; p < n - 1; ++p)
                for (Eigen::Index q = p + 1; q < n; ++q)
                {
                    const double r = std::abs(A(p, q));
                    if (r <= 1e-300 || r < 1e-18 * scale)
                        continue;
                    const cplx ph = A(p, q) / r; // e^{j phi}
                    const double app = A(p, p).real(), aqq = A(q, q).real();
                    const double tau = (aqq - app) / (2.0 * r);
                    const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                    const double c = 1.0 / std::sqrt(1.0 + t * t);
                    const double s = t * c;
                    const cplx eneg = std::conj(ph);

                    // columns: A <- A G with G = [[c, s], [-s e^{-j phi}, c e^{-j phi}]]
                    for (Eigen::Index k = 0; k < n; ++k)
                    {
                        const cplx akp = A(k, p), akq = A(k, q);
                        A(k, p) = c * akp - s * eneg * akq;
                        A(k, q) = s * akp + c * eneg * akq;
                        const cplx vkp = V(k, p), vkq = V(k, q);
                        V(k, p) = c * vkp - s * eneg * vkq;
                        V(k, q) = s * vkp + c * eneg * vkq;
                    }
                    // rows: A <- G^H A
                    for (Eigen::Index k = 0; k < n; ++k)
                    {
                        const cplx apk = A(p, k), aqk = A(q, k);
                        A(p, k) = c * apk - s * ph * aqk;
                        A(q, k) = s * apk + c * ph * aqk;
                    }
                    A(p, q) = 0.0;
                    A(q, p) = 0.0;
                    A(p, p) = A(p, p).real();
                    A(q, q) = A(q, q).real();
                }
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return A(a, a).real() > A(b, b).real(); });
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        out.values(i) = A(order[i], order[i]).real();
        out.vectors.col(i) = V.col(order[i]);
    }
    return out;
}

double largest_eigenvalue(const CMatrix &A, double tol)
{
    check_hermitian(A);
    const Eigen::Index n = A.rows();
    if (n == 0)
        return 0.0;
    if (A.norm() == 0.0)
        return 0.0;

    // Deterministic pseudo-random start so that structured eigenvectors are never orthogonal to it
    CVector v(n);
    std::uint64_t s = 0x9e3779b97f4a7c15ULL;
    for (Eigen::Index i = 0; i < n; ++i)
    {
        s = s * 6364136223846793005ULL + 1442695040888963407ULL;
        double a = static_cast<double>(s >> 11) * 0x1.0p-53;
        s = s * 6364136223846793005ULL + 1442695040888963407ULL;
        double b = static_cast<double>(s >> 11) * 0x1.0p-53;
        v(i) = cplx(a - 0.5, b - 0.5);
    }
    v.normalize();

    double lambda = 0.0;
    for (int it = 0; it < 500; ++it)
    {
        CVector w = A * v;
        double nw = w.norm();
        if (nw == 0.0)
            break;
        double next = (v.adjoint() * w)(0, 0).real();
        v = w / nw;
        if (it > 0 && std::abs(next - lambda) <= tol * std::abs(next))
        {
            // Rayleigh quotient converged; confirm the residual
            CVector r = A * v - next * v;
            if (r.norm() <= 1e-6 * std::abs(next))
                return next;
        }
        lambda = next;
    }
    return hermitian_eig(A).values(0);
}

std::size_t numerical_rank(const Eigen::VectorXd &values, double rel_threshold)
{
    if (values.size() == 0)
        return 0;
    double vmax = values.maxCoeff();
    if (vmax <= 0.0)
        return 0;
    std::size_t r = 0;
    for (Eigen::Index i = 0; i < values.size(); ++i)
        if (values(i) > rel_threshold * vmax)
            ++r;
    return r;
}

} // namespace arraydist
