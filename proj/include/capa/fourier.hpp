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

#ifndef CAPA_FOURIER_HPP
#define CAPA_FOURIER_HPP

#include "capa/correlation.hpp"
#include "capa/cov_solver.hpp"
#include "capa/finite_wsr.hpp"
#include "capa/fourier_basis.hpp"

namespace capa
{
    // Oscillatory integrands need ceil(3.5 max(N_x, N_y)) + 8 nodes per axis; never fewer than base_order.
    int fourier_rule_order(const FourierBasis &basis, int base_order);

    // g(n, i) = integral of H_i Phi_n over the grid of corr. Column i is the Fourier transform of user i's channel.
    ComplexMatrix fourier_channels(const CorrelationMatrix &corr, const FourierBasis &basis);
    ComplexMatrix fourier_channels(const Scenario &scenario, const FourierBasis &basis, int rule_order);

    // J_k(s_m) = sum_n v(n, k) Phi_n(s_m) on the grid of corr, as an (M^2 x K) table.
    ComplexMatrix fourier_pattern_samples(const CorrelationMatrix &corr, const FourierBasis &basis,
                                          const ComplexMatrix &v);

    struct FourierConfig
    {
        int base_order = 20;
        int order_scale = 1; // multiplies N_x and N_y of the truncation
        DiscreteConfig solver;
    };

    struct FourierSolution
    {
        FourierBasis basis;
        int rule_order = 0;
        DiscreteSolution discrete; // objective of the truncated problem
        std::vector<BeamPattern> patterns; // continuous patterns, rescaled to exactly P by quadrature
        double discrete_power = 0.0;       // sum ||v_k||^2 before the rescale
        double quadrature_power = 0.0;     // sum of integral |J_k|^2 before the rescale
        RateReport continuous;             // rates of the continuous patterns against the exact channels
    };

    FourierSolution fourier_solve(const Scenario &scenario, const FourierConfig &config, bool zero_forcing);

    // Half-wavelength antenna grid over the aperture, s = ((n_x - 1) d - L_x/2, (n_y - 1) d - L_y/2, 0).
    struct MimoGrid
    {
        double spacing = 0.0;
        double element_area = 0.0; // lambda^2 / (4 pi)
        int nx = 0;
        int ny = 0;
        std::vector<Vec3> positions; // n_x outer, n_y inner

        std::size_t size() const { return positions.size(); }
    };

    MimoGrid mimo_grid(const Scenario &scenario);

    // h(n, k) = sqrt(A_d) H_k(s_n).
    ComplexMatrix mimo_channels(const Scenario &scenario, const MimoGrid &grid);

    DiscreteProblem make_discrete_problem(const Scenario &scenario, ComplexMatrix channels);

    DiscreteSolution mimo_solve(const Scenario &scenario, const DiscreteConfig &config, bool zero_forcing);
}

#endif
