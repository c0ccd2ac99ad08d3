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

#include "capa/scenario.hpp"
#include "capa/error.hpp"

#include <random>
#include <string>

namespace capa
{
    bool Aperture::contains(const Vec3 &s, double slack) const
    {
        return std::abs(s.x) <= 0.5 * lx + slack && std::abs(s.y) <= 0.5 * ly + slack && std::abs(s.z) <= slack;
    }

    std::vector<double> Scenario::noise_powers() const
    {
        std::vector<double> out;
        out.reserve(users.size());
        for (const auto &u : users)
            out.push_back(u.noise_power);
        return out;
    }

    std::vector<double> Scenario::weights() const
    {
        std::vector<double> out;
        out.reserve(users.size());
        for (const auto &u : users)
            out.push_back(u.weight);
        return out;
    }

    void Scenario::validate() const
    {
        if (!(aperture.lx > 0.0) || !(aperture.ly > 0.0))
            throw InvalidArgument("aperture: lx and ly must be positive");
        if (!(frequency > 0.0) || !(light_speed > 0.0))
            throw InvalidArgument("scenario: frequency and light speed must be positive");
        if (!(impedance > 0.0))
            throw InvalidArgument("scenario: impedance must be positive");
        if (!(power_budget_mA2 > 0.0))
            throw InvalidArgument("scenario: power budget must be positive");
        if (users.empty())
            throw InvalidArgument("scenario: at least one user is required");

        bool any_weight = false;
        for (std::size_t k = 0; k < users.size(); ++k)
        {
            const auto &u = users[k];
            const std::string tag = "users[" + std::to_string(k) + "]";
            if (std::abs(u.polarization.norm() - 1.0) > 1e-12)
                throw InvalidArgument(tag + ".polarization must be a unit vector");
            if (!(u.noise_power > 0.0))
                throw InvalidArgument(tag + ".noise_power must be positive");
            if (!(u.weight >= 0.0))
                throw InvalidArgument(tag + ".weight must be non-negative");
            if (!(u.absorption > 0.0 && u.absorption <= 1.0))
                throw InvalidArgument(tag + ".absorption must lie in (0, 1]");
            any_weight = any_weight || u.weight > 0.0;
            for (std::size_t j = 0; j < k; ++j)
                if ((users[j].position - u.position).norm() < min_user_separation)
                    throw InvalidArgument(tag + ".position coincides with users[" + std::to_string(j) + "]");
        }
        if (!any_weight)
            throw InvalidArgument("scenario: at least one user weight must be positive");
    }

    Scenario sample_scenario(const Scenario &base, const UserRegion &region, std::uint64_t seed)
    {
        if (!(region.ux >= 0.0) || !(region.uy >= 0.0) || !(region.z_max >= region.z_min))
            throw InvalidArgument("user region: bounds are inconsistent");

        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> dx(-region.ux, region.ux);
        std::uniform_real_distribution<double> dy(-region.uy, region.uy);
        std::uniform_real_distribution<double> dz(region.z_min, region.z_max);

        Scenario out = base;
        for (std::size_t k = 0; k < out.users.size(); ++k)
        {
            for (int attempt = 0;; ++attempt)
            {
                if (attempt == 1000)
                    throw InvalidArgument("user region: too small to place users apart");
                const double x = dx(rng);
                const double y = dy(rng);
                const double z = dz(rng);
                const Vec3 p{x, y, z};
                bool clash = false;
                for (std::size_t j = 0; j < k && !clash; ++j)
                    clash = (out.users[j].position - p).norm() < min_user_separation;
                if (!clash)
                {
                    out.users[k].position = p;
                    break;
                }
            }
        }
        return out;
    }

    Scenario default_scenario(std::size_t num_users)
    {
        Scenario s;
        s.users.resize(num_users);
        for (auto &u : s.users)
            u.weight = 1.0 / static_cast<double>(num_users);
        return s;
    }
}
