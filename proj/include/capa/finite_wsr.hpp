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

#ifndef CAPA_FINITE_WSR_HPP
#define CAPA_FINITE_WSR_HPP

#include "capa/linalg.hpp"
#include "capa/starts.hpp"

#include <vector>

namespace capa
{
    // Classical multi-user downlink: user i receives g_i^T v_k from beamformer k.
    struct DiscreteProblem
    {
        ComplexMatrix channels; // N x K, column k = g_k
        RealVector noise;
        RealVector weights;
        double power = 0.0;

        Eigen::Index num_users() const { return channels.cols(); }
        void validate() const;
    };

    struct DiscreteConfig
    {
        double rel_tol = 1e-9;
        int max_iters = 200;
        StartPlan starts; // start k is conj(G) R_k; the best converged objective wins
        bool refine_served_set = true; // then try dropping / re-adding single users from the winner
        bool extrapolate = true; // Anderson-mixed proposals, taken only when they beat the plain step

        void validate() const;
    };

    struct DiscreteSolution
    {
        ComplexMatrix beamformers; // N x K, sum of squared column norms = P
        RealVector sinr;
        RealVector rates; // unweighted
        double wsr = 0.0;
        std::vector<double> trace;
        int iterations = 0;
        int total_iterations = 0; // summed over all starts
        bool converged = false;
        StartKind start = StartKind::matched_filter;
        std::size_t starts_tried = 0;
        double wall_time = 0.0; // seconds
    };

    // Fractional-programming block ascent. Every iteration solves one N x N Hermitian system by Cholesky.
    DiscreteSolution fp_solve(const DiscreteProblem &problem, const DiscreteConfig &config = {});

    // Pseudoinverse zero-forcing with water-filled powers. Throws when the channels are rank deficient.
    DiscreteSolution discrete_zf_solve(const DiscreteProblem &problem);

    // Overlaps g_i^T v_k arranged as (i, k).
    ComplexMatrix discrete_overlaps(const ComplexMatrix &channels, const ComplexMatrix &beamformers);
}

#endif
