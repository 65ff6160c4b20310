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

namespace arraydist
{

struct EigenDecomposition
{
    Eigen::VectorXd values; // descending
    CMatrix vectors;        // orthonormal columns, vectors.col(i) belongs to values(i)
    int sweeps = 0;
};

// Cyclic complex Jacobi. Throws InputError for non-Hermitian input (relative defect > 1e-10).
EigenDecomposition hermitian_eig(const CMatrix &A, double tol = 1e-12);

// Largest eigenvalue of a Hermitian PSD matrix by power iteration, Jacobi fallback
double largest_eigenvalue(const CMatrix &A, double tol = 1e-13);

// Count of eigenvalues above rel_threshold * lambda_max
std::size_t numerical_rank(const Eigen::VectorXd &values, double rel_threshold = 1e-9);

} // namespace arraydist
