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

#include "capa/linalg.hpp"
#include "capa/error.hpp"

#include <cmath>
#include <string>

namespace capa
{
    namespace
    {
        double inf_norm(const ComplexMatrix &a)
        {
            return a.rows() == 0 ? 0.0 : a.cwiseAbs().rowwise().sum().maxCoeff();
        }

        void require_square(const ComplexMatrix &a, const char *who)
        {
            if (a.rows() != a.cols())
                throw InvalidArgument(std::string(who) + ": matrix must be square");
        }

        // Lower Cholesky factor; throws on a non-positive pivot.
        ComplexMatrix cholesky_lower(const ComplexMatrix &q)
        {
            const Eigen::Index n = q.rows();
            ComplexMatrix l = ComplexMatrix::Zero(n, n);
            for (Eigen::Index j = 0; j < n; ++j)
            {
                double d = q(j, j).real();
                for (Eigen::Index k = 0; k < j; ++k)
                    d -= std::norm(l(j, k));
                if (!(d > 0.0) || !std::isfinite(d))
                    throw NotPositiveDefiniteError(static_cast<std::size_t>(j),
                                                   "cholesky: non-positive pivot at index " + std::to_string(j));
                const double ljj = std::sqrt(d);
                l(j, j) = ljj;
                for (Eigen::Index i = j + 1; i < n; ++i)
                {
                    std::complex<double> s = q(i, j);
                    for (Eigen::Index k = 0; k < j; ++k)
                        s -= l(i, k) * std::conj(l(j, k));
                    l(i, j) = s / ljj;
                }
            }
            return l;
        }
    }

    bool all_finite(const ComplexMatrix &m)
    {
        return m.allFinite();
    }

    ComplexMatrix solve_general(const ComplexMatrix &a, const ComplexMatrix &b)
    {
        require_square(a, "solve_general");
        if (b.rows() != a.rows())
            throw InvalidArgument("solve_general: right-hand side is not conformable");

        const Eigen::PartialPivLU<ComplexMatrix> lu(a);
        const double threshold = singular_pivot_tolerance * inf_norm(a);
        const auto &packed = lu.matrixLU();
        for (Eigen::Index i = 0; i < packed.rows(); ++i)
            if (!(std::abs(packed(i, i)) >= threshold) || std::abs(packed(i, i)) == 0.0)
                throw SingularMatrixError(static_cast<std::size_t>(i),
                                          "solve_general: numerically singular matrix (pivot " + std::to_string(i) + ")");
        return lu.solve(b);
    }

    ComplexMatrix solve_hermitian_pd(const ComplexMatrix &a, const ComplexMatrix &b)
    {
        require_square(a, "solve_hermitian_pd");
        if (b.rows() != a.rows())
            throw InvalidArgument("solve_hermitian_pd: right-hand side is not conformable");
        const Eigen::LLT<ComplexMatrix> llt(a);
        if (llt.info() != Eigen::Success)
            throw NotPositiveDefiniteError(0, "solve_hermitian_pd: matrix is not positive definite");
        return llt.solve(b);
    }

    HermitianInverse invert_hermitian_pd(const ComplexMatrix &q)
    {
        require_square(q, "invert_hermitian_pd");
        const double scale = q.norm();
        if ((q - q.adjoint()).norm() > 1e-10 * scale)
            throw InvalidArgument("invert_hermitian_pd: matrix is not Hermitian");

        const ComplexMatrix l = cholesky_lower(q);
        const Eigen::VectorXd diag = l.diagonal().real();
        const double ratio = diag.maxCoeff() / diag.minCoeff();
        HermitianInverse out;
        out.condition_estimate = ratio * ratio;
        if (out.condition_estimate > max_condition_estimate)
            throw IllConditionedError(out.condition_estimate,
                                      "invert_hermitian_pd: condition estimate " + std::to_string(out.condition_estimate) +
                                          " exceeds " + std::to_string(max_condition_estimate));

        const Eigen::Index n = q.rows();
        ComplexMatrix x = ComplexMatrix::Identity(n, n);
        l.triangularView<Eigen::Lower>().solveInPlace(x);
        l.adjoint().triangularView<Eigen::Upper>().solveInPlace(x);
        out.inverse = 0.5 * (x + x.adjoint());
        return out;
    }

    ComplexMatrix gram_pinv_apply(const ComplexMatrix &g)
    {
        if (g.cols() > g.rows())
            throw InvalidArgument("gram_pinv_apply: more columns than rows, cannot have full column rank");
        const ComplexMatrix gram = g.adjoint() * g;
        return invert_hermitian_pd(gram).inverse * g.adjoint();
    }
}
