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

#ifndef CAPA_STARTS_HPP
#define CAPA_STARTS_HPP

#include "capa/linalg.hpp"

#include <cstdint>
#include <vector>

namespace capa
{
    // Starting points for the block-ascent solvers. A start is a K x K mixing matrix R: pattern k begins as
    // sum_j R(j, k) conj(H_j) (continuous) or column k of conj(G) R (discrete). The weighted sum rate has many
    // local maxima, so the solvers run from each start and keep the best.
    struct StartPlan
    {
        bool matched_filter = true;
        bool zero_forcing = true;                         // water-filled ZF, powers floored at 1e-6 P / K
        std::vector<int> regularized_decades{-3, -2, -1, 0, 1, 2, 3}; // (gram + delta I)^{-1}, delta = 10^d sum(sigma^2) / P
        int random_starts = 8;                            // complex Gaussian R
        std::uint64_t seed = 0x9e3779b97f4a7c15ULL;

        std::size_t max_starts() const
        {
            return (matched_filter ? 1 : 0) + (zero_forcing ? 1 : 0) + regularized_decades.size() +
                   static_cast<std::size_t>(random_starts);
        }
        void validate() const;
    };

    enum class StartKind
    {
        matched_filter,
        zero_forcing,
        regularized,
        random
    };

    const char *start_kind_name(StartKind kind);

    struct StartMixture
    {
        StartKind kind;
        ComplexMatrix mixing;
    };

    // gram(a, b) = <channel a, channel b>, i.e. Q for the continuous problem and G^T conj(G) for the discrete one.
    // The ZF start is dropped silently when gram cannot be inverted safely.
    std::vector<StartMixture> start_mixtures(const ComplexMatrix &gram, const RealVector &noise,
                                             const RealVector &weights, double power, const StartPlan &plan);

    // Only the matched-filter start, or only the ZF start.
    StartPlan single_start(StartKind kind);
}

#endif
