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

#ifndef CAPA_ANDERSON_HPP
#define CAPA_ANDERSON_HPP

#include "capa/linalg.hpp"

#include <deque>

namespace capa::detail
{
    // Anderson mixing (type II) for a fixed-point map x -> g(x). Callers decide whether to take the
    // proposal; the mixer only remembers the (x, g) pairs it was shown.
    class AndersonMixer
    {
    public:
        explicit AndersonMixer(std::size_t memory) : memory_(memory) {}

        // Returns g when there is no history yet.
        ComplexVector propose(const ComplexVector &x, const ComplexVector &g)
        {
            const ComplexVector f = g - x;
            if (has_prev_)
            {
                df_.push_back(f - f_prev_);
                dg_.push_back(g - g_prev_);
                if (df_.size() > memory_)
                {
                    df_.pop_front();
                    dg_.pop_front();
                }
            }
            f_prev_ = f;
            g_prev_ = g;
            has_prev_ = true;
            if (df_.empty())
                return g;

            const auto n = static_cast<Eigen::Index>(df_.size());
            ComplexMatrix df(f.size(), n), dg(g.size(), n);
            for (Eigen::Index j = 0; j < n; ++j)
            {
                df.col(j) = df_[static_cast<std::size_t>(j)];
                dg.col(j) = dg_[static_cast<std::size_t>(j)];
            }
            const ComplexVector gamma = df.completeOrthogonalDecomposition().solve(f);
            if (!gamma.allFinite())
                return g;
            return g - dg * gamma;
        }

        void reset()
        {
            df_.clear();
            dg_.clear();
            has_prev_ = false;
        }

    private:
        std::size_t memory_;
        std::deque<ComplexVector> df_, dg_;
        ComplexVector f_prev_, g_prev_;
        bool has_prev_ = false;
    };
}

#endif
