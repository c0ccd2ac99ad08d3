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

#ifndef CAPA_QUADRATURE_HPP
#define CAPA_QUADRATURE_HPP

#include "capa/scenario.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

namespace capa
{
    struct QuadratureRule
    {
        int order = 0;
        std::vector<double> nodes;   // roots of P_M, strictly increasing in (-1, 1)
        std::vector<double> weights; // positive, summing to 2
    };

    // M-point Gauss-Legendre rule on [-1, 1]. Throws InvalidArgument for M < 1 and InternalError if a
    // Newton root search fails to converge in 100 steps.
    QuadratureRule gauss_legendre_rule(int order);

    // Evaluates (P_M(x), P'_M(x)) by the three-term recurrence.
    std::pair<double, double> legendre_with_derivative(int order, double x);

    // Tensor-product rule over the aperture. Point m = iy * M + ix sits at
    // (theta_ix lx / 2, theta_iy ly / 2, 0) with weight w_ix w_iy lx ly / 4.
    struct ApertureGrid
    {
        Aperture aperture;
        QuadratureRule rule;
        std::vector<Vec3> points;
        std::vector<double> weights;

        std::size_t size() const { return points.size(); }
    };

    ApertureGrid make_aperture_grid(const Aperture &aperture, int order);

    // Weighted sum of f over the grid points, accumulated in point order.
    std::complex<double> integrate_aperture(const ApertureGrid &grid,
                                            const std::function<std::complex<double>(const Vec3 &)> &f);

    // Per-thread counters of aperture integrals and integrand evaluations.
    struct QuadratureCounters
    {
        std::uint64_t integrals = 0;
        std::uint64_t point_evaluations = 0;
    };

    QuadratureCounters quadrature_counters();
    void reset_quadrature_counters();
    // Used by modules that evaluate aperture integrals with their own inner loops.
    void count_quadrature(std::uint64_t integrals, std::uint64_t point_evaluations);
}

#endif
