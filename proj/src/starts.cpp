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

#include "capa/starts.hpp"
#include "capa/error.hpp"
#include "capa/zf_solver.hpp"

#include <cmath>
#include <random>

namespace capa
{
    void StartPlan::validate() const
    {
        if (random_starts < 0)
            throw InvalidArgument("start plan: random_starts must be non-negative");
        if (max_starts() == 0)
            throw InvalidArgument("start plan: no starting point selected");
    }

    const char *start_kind_name(StartKind kind)
    {
        switch (kind)
        {
        case StartKind::matched_filter:
            return "matched_filter";
        case StartKind::zero_forcing:
            return "zero_forcing";
        case StartKind::regularized:
            return "regularized";
        case StartKind::random:
            return "random";
        }
        return "unknown";
    }

    StartPlan single_start(StartKind kind)
    {
        StartPlan p;
        p.matched_filter = kind == StartKind::matched_filter;
        p.zero_forcing = kind == StartKind::zero_forcing;
        p.regularized_decades.clear();
        p.random_starts = 0;
        if (kind == StartKind::regularized)
            p.regularized_decades = {0};
        if (kind == StartKind::random)
            p.random_starts = 1;
        return p;
    }

    std::vector<StartMixture> start_mixtures(const ComplexMatrix &gram, const RealVector &noise,
                                             const RealVector &weights, double power, const StartPlan &plan)
    {
        plan.validate();
        const auto k_users = gram.rows();
        std::vector<StartMixture> out;
        if (plan.matched_filter)
            out.push_back({StartKind::matched_filter, ComplexMatrix::Identity(k_users, k_users)});
        if (plan.zero_forcing)
        {
            try
            {
                HermitianInverse inv = invert_hermitian_pd(gram);
                const RealVector u = inv.inverse.diagonal().real();
                RealVector p = water_filling(u, noise, weights, power).powers;
                p = p.cwiseMax(1e-6 * power / static_cast<double>(k_users));
                const RealVector amp = p.cwiseQuotient(u).cwiseSqrt();
                out.push_back({StartKind::zero_forcing, inv.inverse * amp.cast<cdouble>().asDiagonal()});
            }
            catch (const IllConditionedError &)
            {
            }
            catch (const NotPositiveDefiniteError &)
            {
            }
        }
        const double base = noise.sum() / power;
        for (int d : plan.regularized_decades)
        {
            ComplexMatrix reg = gram;
            reg.diagonal().array() += base * std::pow(10.0, d);
            out.push_back({StartKind::regularized, solve_general(reg, ComplexMatrix::Identity(k_users, k_users))});
        }
        std::mt19937_64 rng(plan.seed);
        std::normal_distribution<double> normal;
        for (int r = 0; r < plan.random_starts; ++r)
        {
            ComplexMatrix m(k_users, k_users);
            for (Eigen::Index j = 0; j < k_users; ++j)
                for (Eigen::Index i = 0; i < k_users; ++i)
                    m(i, j) = cdouble(normal(rng), normal(rng));
            out.push_back({StartKind::random, std::move(m)});
        }
        return out;
    }
}
