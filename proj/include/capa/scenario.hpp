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

#ifndef CAPA_SCENARIO_HPP
#define CAPA_SCENARIO_HPP

#include <cmath>
#include <cstdint>
#include <vector>

namespace capa
{
    // Cartesian point or direction, meters (unitless for polarisations).
    struct Vec3
    {
        double x = 0.0;
        double y = 0.0;
        double z = 0.0;

        constexpr Vec3 operator+(const Vec3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
        constexpr Vec3 operator-(const Vec3 &o) const { return {x - o.x, y - o.y, z - o.z}; }
        constexpr Vec3 operator*(double a) const { return {a * x, a * y, a * z}; }
        constexpr double dot(const Vec3 &o) const { return x * o.x + y * o.y + z * o.z; }
        double norm() const { return std::sqrt(dot(*this)); }
        bool operator==(const Vec3 &) const = default;
    };

    inline constexpr Vec3 unit_x{1.0, 0.0, 0.0};
    inline constexpr Vec3 unit_y{0.0, 1.0, 0.0};
    inline constexpr Vec3 unit_z{0.0, 0.0, 1.0};

    // Rectangle of size lx x ly in the z = 0 plane, centred at the origin.
    struct Aperture
    {
        double lx = 0.5;
        double ly = 0.5;

        double area() const { return lx * ly; }
        bool contains(const Vec3 &s, double slack = 1e-12) const;
    };

    struct User
    {
        Vec3 position;
        Vec3 polarization = unit_y;
        double noise_power = 5.6e-3; // V^2/m^2
        double weight = 1.0;
        double absorption = 1.0; // only enters the received power-density diagnostic
    };

    // Power budgets are quoted in mA^2. The solvers work in A^2 with the milli prefix applied to the
    // squared unit: 1 mA^2 = 1e-3 A^2.
    inline constexpr double power_unit_scale = 1e-3;

    struct Scenario
    {
        Aperture aperture;
        std::vector<User> users;
        double frequency = 2.4e9;                         // Hz
        double impedance = 120.0 * 3.14159265358979323846; // ohm
        double power_budget_mA2 = 100.0;
        double light_speed = 3e8; // m/s

        std::size_t num_users() const { return users.size(); }
        double wavelength() const { return light_speed / frequency; }
        // Transmit power budget in solver units (A^2).
        double transmit_power() const { return power_budget_mA2 * power_unit_scale; }

        std::vector<double> noise_powers() const;
        std::vector<double> weights() const;

        // Throws InvalidArgument when an invariant is violated (K = 0, non-unit polarisation,
        // sigma^2 <= 0, duplicate positions, non-positive geometry or budget).
        void validate() const;
    };

    // Box [-ux, ux] x [-uy, uy] x [z_min, z_max] from which user positions are drawn.
    struct UserRegion
    {
        double ux = 5.0;
        double uy = 5.0;
        double z_min = 15.0;
        double z_max = 30.0;
    };

    inline constexpr double min_user_separation = 1e-6;

    // Redraws the user positions of base uniformly over the region. All other user attributes are kept.
    // Deterministic per seed; positions closer than min_user_separation to an earlier user are redrawn.
    Scenario sample_scenario(const Scenario &base, const UserRegion &region, std::uint64_t seed);

    // Scenario with the default simulation setup: A_T = 0.25 m^2, 2.4 GHz, eta = 120 pi, P_T = 100 mA^2,
    // sigma^2 = 5.6e-3, alpha_k = 1/K, y-polarised users. Positions are all zero until sampled.
    Scenario default_scenario(std::size_t num_users = 8);
}

#endif
