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

#include "capa/fourier.hpp"
#include "capa/em.hpp"
#include "capa/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

namespace capa
{
    int fourier_rule_order(const FourierBasis &basis, int base_order)
    {
        // mode products oscillate up to 2N periods per side; Gauss-Legendre needs about 3.5 N nodes for 1e-6
        const int n = std::max(basis.nx, basis.ny);
        return std::max(base_order, (7 * n + 1) / 2 + 8);
    }

    namespace
    {
        // Per-axis factors of Phi_n on the tensor grid: ex(i, n_x + N_x) and ey(i, n_y + N_y).
        struct AxisFactors
        {
            ComplexMatrix ex;
            ComplexMatrix ey;
        };

        AxisFactors axis_factors(const ApertureGrid &grid, const FourierBasis &basis)
        {
            const auto &nodes = grid.rule.nodes;
            const auto m = static_cast<Eigen::Index>(nodes.size());
            const double lx = basis.aperture.lx, ly = basis.aperture.ly;
            AxisFactors f;
            f.ex.resize(m, 2 * basis.nx + 1);
            f.ey.resize(m, 2 * basis.ny + 1);
            const double amp = 1.0 / std::sqrt(basis.aperture.area());
            for (Eigen::Index i = 0; i < m; ++i)
            {
                const double x = 0.5 * lx * nodes[static_cast<std::size_t>(i)];
                const double y = 0.5 * ly * nodes[static_cast<std::size_t>(i)];
                for (int n = -basis.nx; n <= basis.nx; ++n)
                    f.ex(i, n + basis.nx) = std::polar(amp, 2.0 * std::numbers::pi * n * (x - 0.5 * lx) / lx);
                for (int n = -basis.ny; n <= basis.ny; ++n)
                    f.ey(i, n + basis.ny) = std::polar(1.0, 2.0 * std::numbers::pi * n * (y - 0.5 * ly) / ly);
            }
            return f;
        }

        // Column of Phi_mode over every grid point (m = iy M + ix).
        void mode_column(const AxisFactors &f, const FourierBasis &basis, std::size_t mode, ComplexVector &out)
        {
            const auto &n = basis.modes[mode];
            const auto m = f.ex.rows();
            const auto cx = f.ex.col(n[0] + basis.nx);
            const auto cy = f.ey.col(n[1] + basis.ny);
            for (Eigen::Index iy = 0; iy < m; ++iy)
                out.segment(iy * m, m) = cx * cy[iy];
        }

        void check_same_aperture(const Aperture &a, const Aperture &b)
        {
            if (a.lx != b.lx || a.ly != b.ly)
                throw InvalidArgument("fourier: basis and scenario apertures differ");
        }
    }

    ComplexMatrix fourier_channels(const CorrelationMatrix &corr, const FourierBasis &basis)
    {
        check_same_aperture(corr.scenario().aperture, basis.aperture);
        const ApertureGrid &grid = corr.grid();
        const AxisFactors f = axis_factors(grid, basis);
        const auto n_points = static_cast<Eigen::Index>(grid.size());
        const auto k_users = static_cast<Eigen::Index>(corr.num_users());

        const Eigen::Map<const RealVector> w(grid.weights.data(), n_points);
        const ComplexMatrix weighted = corr.channel_samples() * w.cast<cdouble>().asDiagonal();

        ComplexMatrix g(static_cast<Eigen::Index>(basis.size()), k_users);
        ComplexVector phi(n_points);
        for (std::size_t n = 0; n < basis.size(); ++n)
        {
            mode_column(f, basis, n, phi);
            g.row(static_cast<Eigen::Index>(n)) = (weighted * phi).transpose();
        }
        const auto integrals = static_cast<std::uint64_t>(basis.size()) * static_cast<std::uint64_t>(k_users);
        count_quadrature(integrals, integrals * static_cast<std::uint64_t>(n_points));
        return g;
    }

    ComplexMatrix fourier_channels(const Scenario &scenario, const FourierBasis &basis, int rule_order)
    {
        return fourier_channels(correlation_matrix(scenario, rule_order), basis);
    }

    ComplexMatrix fourier_pattern_samples(const CorrelationMatrix &corr, const FourierBasis &basis,
                                          const ComplexMatrix &v)
    {
        if (v.rows() != static_cast<Eigen::Index>(basis.size()))
            throw InvalidArgument("fourier_pattern_samples: coefficient rows must match the basis size");
        const AxisFactors f = axis_factors(corr.grid(), basis);
        const auto n_points = static_cast<Eigen::Index>(corr.grid().size());
        ComplexMatrix j = ComplexMatrix::Zero(n_points, v.cols());
        ComplexVector phi(n_points);
        for (std::size_t n = 0; n < basis.size(); ++n)
        {
            mode_column(f, basis, n, phi);
            j.noalias() += phi * v.row(static_cast<Eigen::Index>(n));
        }
        return j;
    }

    DiscreteProblem make_discrete_problem(const Scenario &scenario, ComplexMatrix channels)
    {
        const UserTerms t = user_terms(scenario);
        DiscreteProblem p;
        p.channels = std::move(channels);
        p.noise = t.noise;
        p.weights = t.weights;
        p.power = t.power;
        return p;
    }

    FourierSolution fourier_solve(const Scenario &scenario, const FourierConfig &config, bool zero_forcing)
    {
        if (config.order_scale < 1)
            throw InvalidArgument("fourier config: order_scale must be at least 1");
        scenario.validate();
        FourierSolution out;
        const FourierBasis base = truncation(scenario.aperture, scenario.wavelength());
        out.basis = make_fourier_basis(scenario.aperture, base.nx * config.order_scale, base.ny * config.order_scale);
        out.rule_order = fourier_rule_order(out.basis, config.base_order);

        const CorrelationMatrix corr = correlation_matrix(scenario, out.rule_order);
        const DiscreteProblem problem = make_discrete_problem(scenario, fourier_channels(corr, out.basis));
        out.discrete = zero_forcing ? discrete_zf_solve(problem) : fp_solve(problem, config.solver);
        out.discrete_power = out.discrete.beamformers.squaredNorm();

        // The truncated problem only approximates the aperture integrals: evaluate the continuous patterns exactly.
        const ComplexMatrix j = fourier_pattern_samples(corr, out.basis, out.discrete.beamformers);
        const auto n_points = static_cast<Eigen::Index>(corr.grid().size());
        const Eigen::Map<const RealVector> w(corr.grid().weights.data(), n_points);
        out.quadrature_power = (w.asDiagonal() * j.cwiseAbs2()).sum();
        const double scale = std::sqrt(problem.power / out.quadrature_power);
        const ComplexMatrix overlaps = corr.channel_samples() * w.cast<cdouble>().asDiagonal() * j * scale;
        const auto k_users = static_cast<std::uint64_t>(problem.num_users());
        count_quadrature(k_users * (k_users + 1), k_users * (k_users + 1) * static_cast<std::uint64_t>(n_points));
        out.continuous = rates_from_overlaps(overlaps, problem.noise, problem.weights);

        for (Eigen::Index k = 0; k < problem.num_users(); ++k)
            out.patterns.push_back(BeamPattern::fourier_modes(out.basis, out.discrete.beamformers.col(k) * scale));
        return out;
    }

    MimoGrid mimo_grid(const Scenario &scenario)
    {
        const double lambda = scenario.wavelength();
        MimoGrid g;
        g.spacing = 0.5 * lambda;
        g.element_area = lambda * lambda / (4.0 * std::numbers::pi);
        g.nx = snapped_ceil(scenario.aperture.lx / g.spacing);
        g.ny = snapped_ceil(scenario.aperture.ly / g.spacing);
        g.positions.reserve(static_cast<std::size_t>(g.nx * g.ny));
        for (int ix = 1; ix <= g.nx; ++ix)
            for (int iy = 1; iy <= g.ny; ++iy)
                g.positions.push_back({(ix - 1) * g.spacing - 0.5 * scenario.aperture.lx,
                                       (iy - 1) * g.spacing - 0.5 * scenario.aperture.ly, 0.0});
        return g;
    }

    ComplexMatrix mimo_channels(const Scenario &scenario, const MimoGrid &grid)
    {
        const auto k_users = static_cast<Eigen::Index>(scenario.num_users());
        ComplexMatrix h(static_cast<Eigen::Index>(grid.size()), k_users);
        const double amp = std::sqrt(grid.element_area);
        for (Eigen::Index k = 0; k < k_users; ++k)
            for (std::size_t n = 0; n < grid.size(); ++n)
                h(static_cast<Eigen::Index>(n), k) =
                    amp * channel_response(scenario, static_cast<std::size_t>(k), grid.positions[n]);
        return h;
    }

    DiscreteSolution mimo_solve(const Scenario &scenario, const DiscreteConfig &config, bool zero_forcing)
    {
        scenario.validate();
        const DiscreteProblem p = make_discrete_problem(scenario, mimo_channels(scenario, mimo_grid(scenario)));
        return zero_forcing ? discrete_zf_solve(p) : fp_solve(p, config);
    }
}
