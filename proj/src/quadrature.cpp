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

#include "capa/quadrature.hpp"
#include "capa/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace capa
{
    namespace
    {
        thread_local QuadratureCounters counters;
    }

    std::pair<double, double> legendre_with_derivative(int order, double x)
    {
        double p0 = 1.0;
        double p1 = x;
        if (order == 0)
            return {1.0, 0.0};
        for (int n = 2; n <= order; ++n)
        {
            const double p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / n;
            p0 = p1;
            p1 = p2;
        }
        // P'_M = M (x P_M - P_{M-1}) / (x^2 - 1); nodes never reach +-1.
        const double dp = order * (x * p1 - p0) / (x * x - 1.0);
        return {p1, dp};
    }

    QuadratureRule gauss_legendre_rule(int order)
    {
        if (order < 1)
            throw InvalidArgument("gauss_legendre_rule: order must be at least 1");

        QuadratureRule rule;
        rule.order = order;
        rule.nodes.assign(order, 0.0);
        rule.weights.assign(order, 0.0);

        const int half = (order + 1) / 2;
        for (int m = 1; m <= half; ++m)
        {
            // Descending roots; m-th root from the right.
            double x = std::cos(std::numbers::pi * (m - 0.25) / (order + 0.5));
            bool converged = false;
            for (int step = 0; step < 100; ++step)
            {
                const auto [p, dp] = legendre_with_derivative(order, x);
                const double dx = p / dp;
                x -= dx;
                if (std::abs(dx) <= 1e-15 || std::abs(dx) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x))
                {
                    converged = true;
                    break;
                }
            }
            if (!converged)
                throw InternalError("gauss_legendre_rule: Newton iteration did not converge for order " +
                                    std::to_string(order));

            const double dp = legendre_with_derivative(order, x).second;
            const double w = 2.0 / ((1.0 - x * x) * dp * dp);
            const int hi = order - m;
            const int lo = m - 1;
            rule.nodes[hi] = x;
            rule.nodes[lo] = -x;
            rule.weights[hi] = w;
            rule.weights[lo] = w;
        }
        if (order % 2 == 1)
            rule.nodes[order / 2] = 0.0;
        return rule;
    }

    ApertureGrid make_aperture_grid(const Aperture &aperture, int order)
    {
        ApertureGrid grid;
        grid.aperture = aperture;
        grid.rule = gauss_legendre_rule(order);
        const auto n = static_cast<std::size_t>(order);
        grid.points.reserve(n * n);
        grid.weights.reserve(n * n);
        const double scale = aperture.lx * aperture.ly / 4.0;
        for (std::size_t iy = 0; iy < n; ++iy)
            for (std::size_t ix = 0; ix < n; ++ix)
            {
                grid.points.push_back({0.5 * aperture.lx * grid.rule.nodes[ix], 0.5 * aperture.ly * grid.rule.nodes[iy], 0.0});
                grid.weights.push_back(scale * grid.rule.weights[ix] * grid.rule.weights[iy]);
            }
        return grid;
    }

    std::complex<double> integrate_aperture(const ApertureGrid &grid,
                                            const std::function<std::complex<double>(const Vec3 &)> &f)
    {
        std::complex<double> acc = 0.0;
        for (std::size_t m = 0; m < grid.points.size(); ++m)
            acc += grid.weights[m] * f(grid.points[m]);
        count_quadrature(1, grid.points.size());
        return acc;
    }

    QuadratureCounters quadrature_counters() { return counters; }

    void reset_quadrature_counters() { counters = {}; }

    void count_quadrature(std::uint64_t integrals, std::uint64_t point_evaluations)
    {
        counters.integrals += integrals;
        counters.point_evaluations += point_evaluations;
    }
}
