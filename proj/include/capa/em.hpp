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

#ifndef CAPA_EM_HPP
#define CAPA_EM_HPP

#include "capa/linalg.hpp"
#include "capa/scenario.hpp"

#include <Eigen/Dense>
#include <complex>

namespace capa
{
    // Radiating-field dyadic Green's function
    //   G(r, s) = -(j eta e^{-j 2 pi d / lambda}) / (2 lambda d) (I - u u^T),  d = |r - s|, u = (r - s) / d.
    // Throws DomainError for coincident points.
    Eigen::Matrix3cd green_kernel(const Vec3 &r, const Vec3 &s, double wavelength, double impedance);

    // Scalar channel H_k(s) = u_k^T G(r_k, s) u_y for a y-polarised source current.
    cdouble channel_response(const Scenario &scenario, std::size_t user_index, const Vec3 &s);

    // Same as channel_response without the scenario lookup; used by the quadrature loops.
    cdouble channel_response(const Vec3 &user_position, const Vec3 &polarization, const Vec3 &s,
                             double wavelength, double impedance);

    // Received power density eps_k / (2 eta) (|field overlap|^2 + sigma_k^2). Diagnostic only.
    double received_power_density(const User &user, double impedance, double field_power);
}

#endif
