// SPDX-License-Identifier: Apache-2.0
//
// capabf: beamforming optimisation for continuous aperture arrays
// Copyright (C) 2026 The capabf authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef CAPA_LINALG_HPP
#define CAPA_LINALG_HPP

#include <Eigen/Dense>
#include <complex>

namespace capa
{
    using ComplexMatrix = Eigen::MatrixXcd;
    using ComplexVector = Eigen::VectorXcd;
    using RealVector = Eigen::VectorXd;
    using cdouble = std::complex<double>;

    inline constexpr double singular_pivot_tolerance = 1e-14;
    inline constexpr double max_condition_estimate = 1e12;

    // X = A^{-1} B by partial-pivoted LU. Throws SingularMatrixError (with the failing pivot) when a pivot
    // falls below singular_pivot_tolerance * ||A||_inf.
    ComplexMatrix solve_general(const ComplexMatrix &a, const ComplexMatrix &b);

    // X = A^{-1} B for Hermitian positive definite A (Cholesky). Throws NotPositiveDefiniteError.
    ComplexMatrix solve_hermitian_pd(const ComplexMatrix &a, const ComplexMatrix &b);

    struct HermitianInverse
    {
        ComplexMatrix inverse;
        // (max_i L_ii / min_i L_ii)^2 of the Cholesky factor; a cheap lower bound on cond(Q).
        double condition_estimate = 1.0;
    };

    // Inverse of a Hermitian positive definite matrix. Throws InvalidArgument if Q is not Hermitian within
    // 1e-10 ||Q||, NotPositiveDefiniteError on Cholesky breakdown and IllConditionedError when the condition
    // estimate exceeds max_condition_estimate.
    HermitianInverse invert_hermitian_pd(const ComplexMatrix &q);

    // (G^H G)^{-1} G^H for a full-column-rank N x K matrix.
    ComplexMatrix gram_pinv_apply(const ComplexMatrix &g);

    bool all_finite(const ComplexMatrix &m);
}

#endif
