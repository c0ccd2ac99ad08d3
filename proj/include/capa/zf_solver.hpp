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

#ifndef CAPA_ZF_SOLVER_HPP
#define CAPA_ZF_SOLVER_HPP

#include "capa/correlation.hpp"
#include "capa/pattern.hpp"

#include <vector>

namespace capa
{
    struct ZfDirections
    {
        ComplexMatrix u;                     // Q^{-1}
        std::vector<BeamPattern> directions; // J_k = sum_j u_{j,k} conj(H_j), unit overlap with user k
        double condition_estimate = 0.0;
    };

    // Throws IllConditionedError when Q is too close to singular (near-coincident users).
    ZfDirections corr_zf_directions(const CorrelationMatrix &corr);

    struct WaterFillingResult
    {
        RealVector powers;
        double level = 0.0;         // nu
        std::size_t num_active = 0; // K_active
    };

    // Maximises sum_k alpha_k log2(1 + P_k / n_k) subject to sum_k P_k = P, P_k >= 0, where n_k = u_kk sigma_k^2.
    // P_k = (nu alpha_k - n_k)^+. Users with alpha_k = 0 get no power.
    WaterFillingResult water_filling(const RealVector &u_diag, const RealVector &noise, const RealVector &weights,
                                     double power);

    struct ZfSolution
    {
        ComplexMatrix u;
        RealVector u_diag;
        RealVector powers;
        RealVector scales; // rho_k = P_k / u_kk
        std::vector<BeamPattern> patterns;
        RealVector rates; // log2(1 + P_k / (u_kk sigma_k^2)), unweighted
        double wsr = 0.0;
        std::size_t num_active = 0;
    };

    // Noise, weights and budget come from scenario, which must have the same users as corr.
    ZfSolution zf_solve(const CorrelationMatrix &corr, const Scenario &scenario);
}

#endif
