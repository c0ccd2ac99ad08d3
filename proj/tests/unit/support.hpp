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

// Independent reference computations for the unit tests. Nothing here calls the library's channel or
// integration code paths, so agreement is a real cross-check.

#ifndef CAPA_TESTS_SUPPORT_HPP
#define CAPA_TESTS_SUPPORT_HPP

#include "capa/linalg.hpp"
#include "capa/quadrature.hpp"
#include "capa/scenario.hpp"

#include <cmath>
#include <complex>
#include <random>

namespace capa_test
{
    using capa::cdouble;
    inline constexpr double pi = 3.14159265358979323846;

    inline capa::Scenario seeded_scenario(std::size_t k, std::uint64_t seed, double power_mA2 = 100.0)
    {
        capa::Scenario s = capa::default_scenario(k);
        s.power_budget_mA2 = power_mA2;
        return capa::sample_scenario(s, capa::UserRegion{}, seed);
    }

    inline capa::Scenario fixed_scenario(const std::vector<capa::Vec3> &positions, double power_mA2 = 100.0)
    {
        capa::Scenario s = capa::default_scenario(positions.size());
        s.power_budget_mA2 = power_mA2;
        for (std::size_t k = 0; k < positions.size(); ++k)
            s.users[k].position = positions[k];
        return s;
    }

    // Magnitude and phase computed separately: eta / (2 lambda d) |P| and -2 pi d / lambda - pi / 2 (+ pi if P < 0),
    // with P = u_k.u_y - (u_k.e)(e.u_y) the projector entry along e = (r - s) / d.
    inline cdouble split_channel(const capa::Vec3 &r, const capa::Vec3 &pol, const capa::Vec3 &s, double lambda,
                                 double eta)
    {
        const double ex = r.x - s.x, ey = r.y - s.y, ez = r.z - s.z;
        const double d = std::sqrt(ex * ex + ey * ey + ez * ez);
        const double proj = pol.y - (pol.x * ex + pol.y * ey + pol.z * ez) * ey / (d * d);
        const double mag = eta / (2.0 * lambda * d) * std::abs(proj);
        const double phase = -2.0 * pi * d / lambda - pi / 2.0 + (proj < 0.0 ? pi : 0.0);
        return std::polar(mag, phase);
    }

    inline cdouble split_channel(const capa::Scenario &sc, std::size_t k, const capa::Vec3 &s)
    {
        return split_channel(sc.users[k].position, sc.users[k].polarization, s, sc.wavelength(), sc.impedance);
    }

    // Pattern k = sum_j c(j, k) conj(H_j), evaluated from the split channel.
    inline cdouble oracle_pattern(const capa::Scenario &sc, const capa::ComplexMatrix &c, Eigen::Index k,
                                  const capa::Vec3 &s)
    {
        cdouble acc = 0.0;
        for (Eigen::Index j = 0; j < c.rows(); ++j)
            acc += c(j, k) * std::conj(split_channel(sc, static_cast<std::size_t>(j), s));
        return acc;
    }

    // Plain tensor-product Gauss-Legendre nodes, built from the rule only.
    struct PlainGrid
    {
        std::vector<capa::Vec3> points;
        std::vector<double> weights;
    };

    inline PlainGrid plain_grid(const capa::Aperture &ap, const capa::QuadratureRule &rule)
    {
        PlainGrid g;
        for (std::size_t iy = 0; iy < rule.nodes.size(); ++iy)
            for (std::size_t ix = 0; ix < rule.nodes.size(); ++ix)
            {
                g.points.push_back({0.5 * ap.lx * rule.nodes[ix], 0.5 * ap.ly * rule.nodes[iy], 0.0});
                g.weights.push_back(0.25 * ap.lx * ap.ly * rule.weights[ix] * rule.weights[iy]);
            }
        return g;
    }

    // w(i, k) = integral of H_i J_k by direct quadrature.
    inline capa::ComplexMatrix oracle_overlaps(const capa::Scenario &sc, const PlainGrid &g,
                                               const capa::ComplexMatrix &c)
    {
        const auto k_users = static_cast<Eigen::Index>(sc.num_users());
        capa::ComplexMatrix w = capa::ComplexMatrix::Zero(k_users, c.cols());
        for (std::size_t m = 0; m < g.points.size(); ++m)
        {
            capa::ComplexVector h(k_users);
            for (Eigen::Index i = 0; i < k_users; ++i)
                h[i] = split_channel(sc, static_cast<std::size_t>(i), g.points[m]);
            const capa::ComplexVector j = c.transpose() * h.conjugate();
            w += g.weights[m] * h * j.transpose();
        }
        return w;
    }

    // Sum over patterns of the integral of |J_k|^2 by direct quadrature.
    inline double oracle_power(const capa::Scenario &sc, const PlainGrid &g, const capa::ComplexMatrix &c)
    {
        const auto k_users = static_cast<Eigen::Index>(sc.num_users());
        double p = 0.0;
        for (std::size_t m = 0; m < g.points.size(); ++m)
        {
            capa::ComplexVector h(k_users);
            for (Eigen::Index i = 0; i < k_users; ++i)
                h[i] = split_channel(sc, static_cast<std::size_t>(i), g.points[m]);
            p += g.weights[m] * (c.transpose() * h.conjugate()).squaredNorm();
        }
        return p;
    }

    inline capa::ComplexMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed)
    {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> n(0.0, 1.0);
        capa::ComplexMatrix m(rows, cols);
        for (Eigen::Index j = 0; j < cols; ++j)
            for (Eigen::Index i = 0; i < rows; ++i)
                m(i, j) = {n(rng), n(rng)};
        return m;
    }

    // Independent WSR oracle for a tall channel matrix G (N x K, user i hears g_i^T v_k): Shen-Yu quadratic
    // transform with an explicit bisection on the power multiplier. Beamformers are kept as V = conj(G) X, so
    // overlaps are Gram X and power is tr(X^H Gram X) with Gram = G^T conj(G). Best of MRT, ZF and random starts.
    inline double oracle_wsr(const capa::ComplexMatrix &g, const capa::RealVector &noise,
                             const capa::RealVector &weights, double power, int random_starts = 4)
    {
        using capa::ComplexMatrix;
        const Eigen::Index k = g.cols();
        const ComplexMatrix gram = g.transpose() * g.conjugate();
        auto power_of = [&](const ComplexMatrix &x) { return (x.adjoint() * gram * x).trace().real(); };
        auto scaled = [&](const ComplexMatrix &x) { return ComplexMatrix(x * std::sqrt(power / power_of(x))); };
        auto wsr_of = [&](const ComplexMatrix &x, Eigen::VectorXd *gamma) {
            const ComplexMatrix o = gram * x;
            double total = 0.0;
            for (Eigen::Index i = 0; i < k; ++i)
            {
                const double d = std::norm(o(i, i));
                const double sinr = d / (o.row(i).squaredNorm() - d + noise[i]);
                if (gamma)
                    (*gamma)[i] = sinr;
                total += weights[i] * std::log2(1 + sinr);
            }
            return total;
        };

        std::vector<ComplexMatrix> starts{scaled(ComplexMatrix::Identity(k, k)), scaled(gram.inverse())};
        for (int r = 0; r < random_starts; ++r)
            starts.push_back(scaled(random_matrix(k, k, 7000 + static_cast<std::uint64_t>(r))));

        double best = 0.0;
        for (ComplexMatrix x : starts)
        {
            double prev = wsr_of(x, nullptr);
            for (int it = 0; it < 20000; ++it)
            {
                Eigen::VectorXd gamma(k);
                wsr_of(x, &gamma);
                const ComplexMatrix o = gram * x;
                Eigen::VectorXd d(k);
                capa::ComplexVector b(k);
                for (Eigen::Index i = 0; i < k; ++i)
                {
                    const double s = std::sqrt(weights[i] * (1 + gamma[i]));
                    const cdouble y = s * o(i, i) / (o.row(i).squaredNorm() + noise[i]);
                    d[i] = std::norm(y);
                    b[i] = s * std::conj(y);
                }
                auto at = [&](double mu) {
                    ComplexMatrix m = d.cast<cdouble>().asDiagonal() * gram;
                    m.diagonal().array() += mu;
                    return ComplexMatrix(m.partialPivLu().solve(ComplexMatrix(b.asDiagonal())));
                };
                double hi = 1.0;
                while (power_of(at(hi)) > power)
                    hi *= 2;
                double lo = hi * 1e-15;
                for (int bis = 0; bis < 200 && hi / lo > 1 + 1e-14; ++bis)
                {
                    const double mid = std::sqrt(lo * hi);
                    (power_of(at(mid)) > power ? lo : hi) = mid;
                }
                x = scaled(at(hi));
                const double now = wsr_of(x, nullptr);
                if (std::abs(now - prev) < 1e-13 * std::abs(prev))
                    break;
                prev = now;
            }
            best = std::max(best, wsr_of(x, nullptr));
        }
        return best;
    }

    struct Exhaustive
    {
        capa::RealVector powers;
        unsigned mask = 0;
    };

    // Tries every active set, keeps the feasible one with the best weighted rate.
    inline Exhaustive exhaustive_water_filling(const capa::RealVector &n, const capa::RealVector &alpha, double p)
    {
        const auto k = static_cast<unsigned>(n.size());
        Exhaustive best;
        double best_value = -1.0;
        for (unsigned mask = 1; mask < (1u << k); ++mask)
        {
            double num = p, den = 0.0;
            bool ok = true;
            for (unsigned i = 0; i < k; ++i)
                if (mask & (1u << i))
                {
                    ok = ok && alpha[i] > 0.0;
                    num += n[i];
                    den += alpha[i];
                }
            if (!ok)
                continue;
            const double nu = num / den;
            capa::RealVector pw = capa::RealVector::Zero(k);
            for (unsigned i = 0; i < k; ++i)
                if (mask & (1u << i))
                {
                    pw[i] = nu * alpha[i] - n[i];
                    ok = ok && pw[i] > 0.0;
                }
            if (!ok)
                continue;
            double value = 0.0;
            for (unsigned i = 0; i < k; ++i)
                value += alpha[i] * std::log2(1 + pw[i] / n[i]);
            if (value > best_value)
            {
                best_value = value;
                best = {pw, mask};
            }
        }
        return best;
    }

    inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }
    inline double rel(cdouble a, cdouble b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }
}

#endif
