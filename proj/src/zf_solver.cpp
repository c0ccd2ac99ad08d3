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

#include "capa/zf_solver.hpp"
#include "capa/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace capa
{
    ZfDirections corr_zf_directions(const CorrelationMatrix &corr)
    {
        HermitianInverse inv = invert_hermitian_pd(corr.q());
        ZfDirections out;
        out.condition_estimate = inv.condition_estimate;
        out.u = std::move(inv.inverse);
        const auto k_users = out.u.cols();
        out.directions.reserve(static_cast<std::size_t>(k_users));
        for (Eigen::Index k = 0; k < k_users; ++k)
            out.directions.push_back(BeamPattern::conjugate_channels(corr.scenario_ptr(), out.u.col(k)));
        return out;
    }

    WaterFillingResult water_filling(const RealVector &u_diag, const RealVector &noise, const RealVector &weights,
                                     double power)
    {
        const auto n = u_diag.size();
        if (noise.size() != n || weights.size() != n)
            throw InvalidArgument("water_filling: size mismatch");
        if (!(power > 0.0))
            throw InvalidArgument("water_filling: power budget must be positive");

        std::vector<Eigen::Index> order;
        RealVector eff(n);
        for (Eigen::Index k = 0; k < n; ++k)
        {
            if (!(u_diag[k] > 0.0) || !(noise[k] > 0.0) || weights[k] < 0.0)
                throw InvalidArgument("water_filling: need u_kk > 0, sigma^2 > 0, alpha >= 0");
            eff[k] = u_diag[k] * noise[k];
            if (weights[k] > 0.0)
                order.push_back(k);
        }
        if (order.empty())
            throw InvalidArgument("water_filling: at least one weight must be positive");

        std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b)
                         { return eff[a] / weights[a] < eff[b] / weights[b]; });

        // Shrink from the noisiest user until the last active one gets strictly positive power.
        std::size_t active = order.size();
        double nu = 0.0;
        for (; active > 0; --active)
        {
            double sum_noise = 0.0, sum_weight = 0.0;
            for (std::size_t i = 0; i < active; ++i)
            {
                sum_noise += eff[order[i]];
                sum_weight += weights[order[i]];
            }
            nu = (power + sum_noise) / sum_weight;
            const Eigen::Index last = order[active - 1];
            if (nu * weights[last] - eff[last] > 0.0)
                break;
        }
        if (active == 0)
            throw InternalError("water_filling: no active user"); // the best user always gets power

        WaterFillingResult out;
        out.powers = RealVector::Zero(n);
        out.level = nu;
        out.num_active = active;
        for (std::size_t i = 0; i < active; ++i)
            out.powers[order[i]] = nu * weights[order[i]] - eff[order[i]];
        return out;
    }

    ZfSolution zf_solve(const CorrelationMatrix &corr, const Scenario &scenario)
    {
        if (scenario.num_users() != corr.num_users())
            throw InvalidArgument("zf_solve: scenario and correlation disagree on the number of users");
        ZfDirections dir = corr_zf_directions(corr);
        const auto k_users = static_cast<Eigen::Index>(corr.num_users());

        ZfSolution out;
        out.u_diag = dir.u.diagonal().real();
        RealVector noise(k_users), weights(k_users);
        for (Eigen::Index k = 0; k < k_users; ++k)
        {
            noise[k] = scenario.users[static_cast<std::size_t>(k)].noise_power;
            weights[k] = scenario.users[static_cast<std::size_t>(k)].weight;
        }
        const double power = scenario.transmit_power();
        WaterFillingResult wf = water_filling(out.u_diag, noise, weights, power);
        out.powers = wf.powers;
        out.num_active = wf.num_active;
        out.scales = out.powers.cwiseQuotient(out.u_diag);
        out.rates.resize(k_users);
        out.wsr = 0.0;
        for (Eigen::Index k = 0; k < k_users; ++k)
        {
            out.rates[k] = std::log2(1.0 + out.powers[k] / (out.u_diag[k] * noise[k]));
            out.wsr += weights[k] * out.rates[k];
            out.patterns.push_back(dir.directions[static_cast<std::size_t>(k)].scaled(std::sqrt(out.scales[k])));
        }
        out.u = std::move(dir.u);
        return out;
    }
}
