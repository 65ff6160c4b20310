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

#include "arraydist/spectral_matrix.hpp"

#include <random>

namespace testutil
{
using arraydist::cplx;
using arraydist::CMatrix;
using arraydist::CVector;

inline CMatrix random_matrix(std::mt19937_64 &rng, Eigen::Index r, Eigen::Index c)
{
    std::normal_distribution<double> n(0.0, 1.0);
    CMatrix m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
        for (Eigen::Index i = 0; i < r; ++i)
            m(i, j) = cplx(n(rng), n(rng));
    return m;
}

inline CMatrix random_psd(std::mt19937_64 &rng, Eigen::Index m, Eigen::Index rank)
{
    CMatrix g = random_matrix(rng, m, rank);
    return g * g.adjoint();
}

// Unit-power circularly symmetric complex Gaussian
inline cplx cgauss(std::mt19937_64 &rng)
{
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    return {n(rng), n(rng)};
}

} // namespace testutil
