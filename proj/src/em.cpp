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

#include "capa/em.hpp"
#include "capa/error.hpp"

#include <numbers>

namespace capa
{
    namespace
    {
        // Scalar prefactor -(j eta e^{-j 2 pi d / lambda}) / (2 lambda d).
        cdouble kernel_scale(double d, double wavelength, double impedance)
        {
            const double phase = -2.0 * std::numbers::pi * d / wavelength;
            return cdouble(0.0, -impedance / (2.0 * wavelength * d)) * std::polar(1.0, phase);
        }
    }

    Eigen::Matrix3cd green_kernel(const Vec3 &r, const Vec3 &s, double wavelength, double impedance)
    {
        const Vec3 diff = r - s;
        const double d = diff.norm();
        if (!(d > 0.0))
            throw DomainError("green_kernel: observation and source points coincide");

        const Eigen::Vector3d u(diff.x / d, diff.y / d, diff.z / d);
        const Eigen::Matrix3d projector = Eigen::Matrix3d::Identity() - u * u.transpose();
        return kernel_scale(d, wavelength, impedance) * projector.cast<cdouble>();
    }

    cdouble channel_response(const Vec3 &user_position, const Vec3 &polarization, const Vec3 &s,
                             double wavelength, double impedance)
    {
        const Vec3 diff = user_position - s;
        const double d = diff.norm();
        if (!(d > 0.0))
            throw DomainError("channel_response: user located on the aperture point");

        // u_k^T (I - u u^T) u_y = u_k.y - (u_k . u) u.y
        const double projected = polarization.y - polarization.dot(diff) * diff.y / (d * d);
        return kernel_scale(d, wavelength, impedance) * projected;
    }

    cdouble channel_response(const Scenario &scenario, std::size_t user_index, const Vec3 &s)
    {
        if (user_index >= scenario.users.size())
            throw InvalidArgument("channel_response: user index out of range");
        const User &u = scenario.users[user_index];
        return channel_response(u.position, u.polarization, s, scenario.wavelength(), scenario.impedance);
    }

    double received_power_density(const User &user, double impedance, double field_power)
    {
        return user.absorption / (2.0 * impedance) * (field_power + user.noise_power);
    }
}
