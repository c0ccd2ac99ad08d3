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

#include "capa/correlation.hpp"
#include "capa/em.hpp"
#include "capa/error.hpp"

namespace capa
{
    CorrelationMatrix::CorrelationMatrix(std::shared_ptr<const Scenario> scenario, ApertureGrid grid,
                                         ComplexMatrix samples, ComplexMatrix q)
        : scenario_(std::move(scenario)), grid_(std::move(grid)), samples_(std::move(samples)), q_(std::move(q))
    {
    }

    namespace
    {
        struct Sampled
        {
            ApertureGrid grid;
            ComplexMatrix samples;
            ComplexMatrix q;
        };

        Sampled sample_and_integrate(const Scenario &scenario, int order)
        {
            scenario.validate();
            Sampled out{make_aperture_grid(scenario.aperture, order), {}, {}};
            const auto k_users = static_cast<Eigen::Index>(scenario.num_users());
            const auto n_points = static_cast<Eigen::Index>(out.grid.size());
            const double wavelength = scenario.wavelength();

            out.samples.resize(k_users, n_points);
            for (Eigen::Index k = 0; k < k_users; ++k)
            {
                const User &u = scenario.users[static_cast<std::size_t>(k)];
                for (Eigen::Index m = 0; m < n_points; ++m)
                    out.samples(k, m) = channel_response(u.position, u.polarization,
                                                         out.grid.points[static_cast<std::size_t>(m)], wavelength,
                                                         scenario.impedance);
            }

            ComplexMatrix q(k_users, k_users);
            for (Eigen::Index a = 0; a < k_users; ++a)
                for (Eigen::Index b = a; b < k_users; ++b)
                {
                    std::complex<double> acc = 0.0;
                    for (Eigen::Index m = 0; m < n_points; ++m)
                        acc += out.grid.weights[static_cast<std::size_t>(m)] * out.samples(a, m) *
                               std::conj(out.samples(b, m));
                    q(a, b) = acc;
                    q(b, a) = std::conj(acc);
                }
            const auto pairs = static_cast<std::uint64_t>(k_users * (k_users + 1) / 2);
            count_quadrature(pairs, pairs * static_cast<std::uint64_t>(n_points));

            // Scrub rounding asymmetry; the diagonal is real by construction.
            out.q = 0.5 * (q + q.adjoint());
            return out;
        }
    }

    CorrelationMatrix correlation_matrix(const Scenario &scenario, int order)
    {
        if (order < min_correlation_order)
            throw InvalidArgument("correlation_matrix: quadrature order must be at least 5");
        Sampled s = sample_and_integrate(scenario, order);
        return CorrelationMatrix(std::make_shared<const Scenario>(scenario), std::move(s.grid), std::move(s.samples),
                                 std::move(s.q));
    }

    ComplexMatrix correlation_at_order(const Scenario &scenario, int order)
    {
        if (order < 1)
            throw InvalidArgument("correlation_at_order: quadrature order must be at least 1");
        return sample_and_integrate(scenario, order).q;
    }

    namespace
    {
        bool same_scenario(const CorrelationMatrix &corr, const BeamPattern &pattern)
        {
            const auto *cc = std::get_if<ConjugateChannelBasis>(&pattern.basis());
            return cc != nullptr && cc->scenario == corr.scenario_ptr();
        }

        ComplexVector samples_at_grid(const CorrelationMatrix &corr, const BeamPattern &pattern)
        {
            const auto &pts = corr.grid().points;
            ComplexVector j(static_cast<Eigen::Index>(pts.size()));
            if (pattern.over_conjugate_channels())
            {
                // Reuse cached samples when the pattern lives on this scenario's channels.
                if (same_scenario(corr, pattern))
                    return corr.channel_samples().adjoint() * pattern.coefficients();
            }
            for (std::size_t m = 0; m < pts.size(); ++m)
                j[static_cast<Eigen::Index>(m)] = pattern(pts[m]);
            return j;
        }
    }

    std::complex<double> overlap(const CorrelationMatrix &corr, std::size_t user_index, const BeamPattern &pattern)
    {
        if (user_index >= corr.num_users())
            throw InvalidArgument("overlap: user index out of range");
        const auto i = static_cast<Eigen::Index>(user_index);
        if (same_scenario(corr, pattern))
            return (corr.q().row(i) * pattern.coefficients())(0, 0);

        const ComplexVector j = samples_at_grid(corr, pattern);
        std::complex<double> acc = 0.0;
        const auto &w = corr.grid().weights;
        for (Eigen::Index m = 0; m < j.size(); ++m)
            acc += w[static_cast<std::size_t>(m)] * corr.channel_samples()(i, m) * j[m];
        count_quadrature(1, static_cast<std::uint64_t>(j.size()));
        return acc;
    }

    double pattern_power_quadrature(const CorrelationMatrix &corr, const BeamPattern &pattern)
    {
        const auto &pts = corr.grid().points;
        const auto &w = corr.grid().weights;
        double acc = 0.0;
        for (std::size_t m = 0; m < pts.size(); ++m)
            acc += w[m] * std::norm(pattern(pts[m]));
        count_quadrature(1, pts.size());
        return acc;
    }

    double pattern_power(const CorrelationMatrix &corr, const BeamPattern &pattern)
    {
        if (!same_scenario(corr, pattern))
            throw InvalidArgument("pattern_power: pattern is not built on this correlation's channels");
        const ComplexVector &c = pattern.coefficients();
        return (c.adjoint() * corr.q() * c)(0, 0).real();
    }
}
