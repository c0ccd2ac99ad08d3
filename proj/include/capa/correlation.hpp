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

#ifndef CAPA_CORRELATION_HPP
#define CAPA_CORRELATION_HPP

#include "capa/linalg.hpp"
#include "capa/pattern.hpp"
#include "capa/quadrature.hpp"
#include "capa/scenario.hpp"

#include <memory>
#include <vector>

namespace capa
{
    // Channel correlations over the aperture. Entry (a, b) of q() is the integral of H_a(s) conj(H_b(s)),
    // so the overlap of J = sum_j c_j conj(H_j) with user i is (Q c)_i. The matrix is Hermitian PSD.
    class CorrelationMatrix
    {
    public:
        CorrelationMatrix(std::shared_ptr<const Scenario> scenario, ApertureGrid grid, ComplexMatrix samples,
                          ComplexMatrix q);

        const ComplexMatrix &q() const { return q_; }
        const ApertureGrid &grid() const { return grid_; }
        // K x M^2 table of H_k at the grid points.
        const ComplexMatrix &channel_samples() const { return samples_; }
        const Scenario &scenario() const { return *scenario_; }
        const std::shared_ptr<const Scenario> &scenario_ptr() const { return scenario_; }
        std::size_t num_users() const { return static_cast<std::size_t>(q_.rows()); }

    private:
        std::shared_ptr<const Scenario> scenario_;
        ApertureGrid grid_;
        ComplexMatrix samples_;
        ComplexMatrix q_;
    };

    inline constexpr int min_correlation_order = 5;

    // Samples every channel once on an M x M Gauss-Legendre grid, integrates the K(K+1)/2 upper-triangle
    // products and mirrors them. Requires M >= 5.
    CorrelationMatrix correlation_matrix(const Scenario &scenario, int order);

    // Same integrals at any order >= 1, for convergence studies. Solvers use correlation_matrix.
    ComplexMatrix correlation_at_order(const Scenario &scenario, int order);

    // Channel overlap w = integral of H_i(s) J(s). Exact through Q for conjugate-channel patterns over the same
    // scenario, otherwise by quadrature on the cached grid.
    std::complex<double> overlap(const CorrelationMatrix &corr, std::size_t user_index, const BeamPattern &pattern);

    // Quadrature of |J|^2 on the cached grid.
    double pattern_power_quadrature(const CorrelationMatrix &corr, const BeamPattern &pattern);

    // c^H Q c for a conjugate-channel pattern.
    double pattern_power(const CorrelationMatrix &corr, const BeamPattern &pattern);
}

#endif
