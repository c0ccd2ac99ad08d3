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

#include "capa/finite_wsr.hpp"
#include "capa/cov_solver.hpp"
#include "capa/error.hpp"
#include "capa/zf_solver.hpp"
#include "anderson.hpp"
#include "user_selection.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace capa
{
    void DiscreteProblem::validate() const
    {
        const auto k_users = channels.cols();
        if (channels.rows() < 1 || k_users < 1)
            throw InvalidArgument("discrete problem: need N >= 1 and K >= 1");
        if (noise.size() != k_users || weights.size() != k_users)
            throw InvalidArgument("discrete problem: one noise power and weight per user");
        if (!(noise.minCoeff() > 0.0))
            throw InvalidArgument("discrete problem: noise powers must be positive");
        if (weights.minCoeff() < 0.0 || !(weights.maxCoeff() > 0.0))
            throw InvalidArgument("discrete problem: weights must be non-negative, not all zero");
        if (!(power > 0.0))
            throw InvalidArgument("discrete problem: power budget must be positive");
        if (!all_finite(channels))
            throw InvalidArgument("discrete problem: channels must be finite");
    }

    void DiscreteConfig::validate() const
    {
        if (!(rel_tol > 0.0))
            throw InvalidArgument("discrete config: rel_tol must be positive");
        if (max_iters < 1)
            throw InvalidArgument("discrete config: max_iters must be at least 1");
        starts.validate();
    }

    ComplexMatrix discrete_overlaps(const ComplexMatrix &channels, const ComplexMatrix &beamformers)
    {
        return channels.transpose() * beamformers;
    }

    namespace
    {
        using Clock = std::chrono::steady_clock;

        struct FpState
        {
            ComplexMatrix v; // unit total power
            ComplexMatrix o;
            RealVector mu;
            ComplexVector lambda;
            double objective = 0.0;
        };

        FpState make_state(ComplexMatrix v, const DiscreteProblem &p)
        {
            const double rho = v.squaredNorm();
            if (!(rho > 0.0))
                throw DegenerateError("fp: beamformers carry no power");
            FpState s;
            s.v = v / std::sqrt(rho);
            s.o = discrete_overlaps(p.channels, s.v);
            MuLambda ml = update_mu_lambda(s.o, 1.0, p.noise, p.power);
            s.mu = std::move(ml.mu);
            s.lambda = std::move(ml.lambda);
            s.objective = weighted_rate(sinr_from_overlaps(s.o, 1.0, p.noise, p.power), p.weights);
            return s;
        }

        FpState fp_step(const FpState &s, const DiscreteProblem &p)
        {
            const AbDiagonals ab = update_ab(s.mu, s.lambda, p.weights, p.noise, p.power);
            const ComplexMatrix gc = p.channels.conjugate();
            ComplexMatrix m = gc * ab.b_bar.cast<cdouble>().asDiagonal() * p.channels.transpose();
            m.diagonal().array() += 1.0;
            const ComplexMatrix rhs = gc * ab.a_bar.conjugate().asDiagonal();
            return make_state(solve_hermitian_pd(m, rhs), p);
        }

        ComplexMatrix zf_directions(const DiscreteProblem &p)
        {
            // V = conj(G) (G^T conj(G))^{-1}, so that G^T V = I.
            return gram_pinv_apply(p.channels.conjugate()).adjoint();
        }

        DiscreteSolution iterate(FpState state, const DiscreteProblem &p, const DiscreteConfig &cfg)
        {
            DiscreteSolution sol;
            sol.trace.push_back(state.objective);
            detail::AndersonMixer mixer(6);
            for (int it = 1; it <= cfg.max_iters; ++it)
            {
                FpState next = fp_step(state, p);
                if (cfg.extrapolate)
                {
                    const Eigen::Index nk = state.v.size();
                    const ComplexVector mixed =
                        mixer.propose(state.v.reshaped(nk, 1), next.v.reshaped(nk, 1));
                    try
                    {
                        FpState cand = make_state(mixed.reshaped(state.v.rows(), state.v.cols()), p);
                        if (cand.objective > next.objective)
                            next = std::move(cand);
                    }
                    catch (const DegenerateError &)
                    {
                    }
                }
                const double change = (next.objective - state.objective) /
                                      std::max(std::abs(state.objective), std::numeric_limits<double>::min());
                state = std::move(next);
                sol.trace.push_back(state.objective);
                sol.iterations = it;
                if (std::abs(change) < cfg.rel_tol)
                {
                    sol.converged = true;
                    break;
                }
            }
            sol.total_iterations = sol.iterations;
            sol.beamformers = state.v;
            return sol;
        }

        void finish(DiscreteSolution &sol, const DiscreteProblem &p)
        {
            sol.beamformers *= std::sqrt(p.power / sol.beamformers.squaredNorm());
            const RateReport r = rates_from_overlaps(discrete_overlaps(p.channels, sol.beamformers), p.noise,
                                                     p.weights);
            sol.sinr = r.sinr;
            sol.rates = r.rates;
            sol.wsr = r.wsr;
        }
    }

    DiscreteSolution fp_solve(const DiscreteProblem &problem, const DiscreteConfig &config)
    {
        const auto t0 = Clock::now();
        problem.validate();
        config.validate();

        const ComplexMatrix gc = problem.channels.conjugate();
        const ComplexMatrix gram = problem.channels.transpose() * gc;
        DiscreteSolution sol;
        int total = 0;
        std::size_t tried = 0;
        for (auto &start : start_mixtures(gram, problem.noise, problem.weights, problem.power, config.starts))
        {
            DiscreteSolution r = iterate(make_state(gc * start.mixing, problem), problem, config);
            r.start = start.kind;
            total += r.iterations;
            if (tried++ == 0 || r.trace.back() > sol.trace.back())
                sol = std::move(r);
        }
        if (config.refine_served_set)
        {
            int runs = 0;
            const StartKind winner = sol.start;
            sol = detail::refine_served_set(
                std::move(sol),
                [&](const ComplexMatrix &x)
                {
                    DiscreteSolution r = iterate(make_state(x, problem), problem, config);
                    r.start = winner;
                    total += r.iterations;
                    return r;
                },
                [](const DiscreteSolution &r) -> const ComplexMatrix & { return r.beamformers; },
                [](const DiscreteSolution &r) { return r.trace.back(); },
                [](const ComplexMatrix &x, Eigen::Index k) { return x.col(k).squaredNorm(); },
                [&](Eigen::Index k) { return ComplexVector(gc.col(k)); }, runs);
            tried += static_cast<std::size_t>(runs);
        }
        sol.total_iterations = total;
        sol.starts_tried = tried;
        finish(sol, problem);
        sol.wall_time = std::chrono::duration<double>(Clock::now() - t0).count();
        return sol;
    }

    DiscreteSolution discrete_zf_solve(const DiscreteProblem &problem)
    {
        const auto t0 = Clock::now();
        problem.validate();
        const ComplexMatrix v = zf_directions(problem);
        const RealVector u = v.colwise().squaredNorm().transpose();
        const RealVector pw = water_filling(u, problem.noise, problem.weights, problem.power).powers;

        DiscreteSolution sol;
        sol.beamformers = v * pw.cwiseQuotient(u).cwiseSqrt().cast<cdouble>().asDiagonal();
        sol.converged = true;
        const RateReport r = rates_from_overlaps(discrete_overlaps(problem.channels, sol.beamformers),
                                                 problem.noise, problem.weights);
        sol.sinr = r.sinr;
        sol.rates = r.rates;
        sol.wsr = r.wsr;
        sol.trace.push_back(sol.wsr);
        sol.wall_time = std::chrono::duration<double>(Clock::now() - t0).count();
        return sol;
    }
}
