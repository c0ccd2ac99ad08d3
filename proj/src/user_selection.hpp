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

#ifndef CAPA_USER_SELECTION_HPP
#define CAPA_USER_SELECTION_HPP

#include "capa/linalg.hpp"

#include <cmath>
#include <utility>
#include <vector>

namespace capa::detail
{
    // Block ascent keeps a switched-off user switched off, and hardly ever switches a weak one off.
    // Local search over the served set: restart from the best solution with one user dropped (pattern zeroed),
    // one idle user added back, or one of each swapped. A pass tries every move from the same point and keeps
    // the best strict improvement; the search stops after a pass without one.
    //   run(X) -> result, X has one column per user
    //   coeffs(result) -> X, objective(result) -> double
    //   column_power(X, k) -> power of column k; seed_column(k) -> column used when adding user k
    template <class Result, class Run, class Coeffs, class Objective, class ColumnPower, class SeedColumn>
    Result refine_served_set(Result best, Run run, Coeffs coeffs, Objective objective, ColumnPower column_power,
                             SeedColumn seed_column, int &runs)
    {
        const double off_fraction = 1e-12;
        for (int pass = 0; pass < 8; ++pass)
        {
            const ComplexMatrix x0 = coeffs(best);
            const auto k_users = x0.cols();
            double total = 0.0;
            for (Eigen::Index j = 0; j < k_users; ++j)
                total += column_power(x0, j);
            std::vector<Eigen::Index> on, off;
            for (Eigen::Index j = 0; j < k_users; ++j)
                (column_power(x0, j) > off_fraction * total ? on : off).push_back(j);
            const double share = total / static_cast<double>(on.size());

            // Moves as (user to drop, user to add); -1 means none.
            std::vector<std::pair<Eigen::Index, Eigen::Index>> moves;
            if (on.size() > 1)
                for (auto i : on)
                    moves.emplace_back(i, -1);
            for (auto j : off)
                moves.emplace_back(-1, j);
            for (auto i : on)
                for (auto j : off)
                    moves.emplace_back(i, j);

            bool improved = false;
            for (const auto &[drop, add] : moves)
            {
                ComplexMatrix x = x0;
                if (drop >= 0)
                    x.col(drop).setZero();
                if (add >= 0)
                {
                    x.col(add) = seed_column(add);
                    x.col(add) *= std::sqrt(share / column_power(x, add));
                }
                Result r = run(x);
                ++runs;
                if (objective(r) > objective(best) * (1.0 + 1e-9))
                {
                    best = std::move(r);
                    improved = true;
                }
            }
            if (!improved)
                break;
        }
        return best;
    }
}

#endif
