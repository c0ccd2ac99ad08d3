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

#include "capa/cov_solver.hpp"
#include "capa/error.hpp"
#include "capa/zf_solver.hpp"
#include "anderson.hpp"
#include "user_selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace capa
{
    void CovConfig::validate() const
    {
        if (!(rel_tol > 0.0))
            throw InvalidArgument("cov config: rel_tol must be positive");
        if (max_iters < 1)
            throw InvalidArgument("cov config: max_iters must be at least 1");
        starts.validate();
    }

    UserTerms user_terms(const Scenario &scenario)
    {
        const auto n = static_cast<Eigen::Index>(scenario.num_users());
        UserTerms t;
        t.noise.resize(n);
        t.weights.resize(n);
        for (Eigen::Index k = 0; k < n; ++k)
        {
            t.noise[k] = scenario.users[static_cast<std::size_t>(k)].noise_power;
            t.weights[k] = scenario.users[static_cast<std::size_t>(k)].weight;
        }
        t.power = scenario.transmit_power();
        return t;
    }

    RealVector sinr_from_overlaps(const ComplexMatrix &w, double rho, const RealVector &noise, double power)
    {
        const auto k_users = w.rows();
        RealVector g(k_users);
        for (Eigen::Index k = 0; k < k_users; ++k)
        {
            const double total = w.row(k).squaredNorm();
            const double desired = std::norm(w(k, k));
            const double den = total - desired + noise[k] * rho / power;
            if (!(den > 0.0))
                throw DegenerateError("sinr: zero interference-plus-noise term");
            g[k] = desired / den;
        }
        return g;
    }

    double weighted_rate(const RealVector &sinr, const RealVector &weights)
    {
        double acc = 0.0;
        for (Eigen::Index k = 0; k < sinr.size(); ++k)
            acc += weights[k] * std::log2(1.0 + sinr[k]);
        return acc;
    }

    MuLambda update_mu_lambda(const ComplexMatrix &w, double rho, const RealVector &noise, double power)
    {
        if (rho < 0.0 || !(power > 0.0))
            throw InvalidArgument("update_mu_lambda: need rho >= 0 and P > 0");
        const auto k_users = w.rows();
        MuLambda out;
        out.mu.resize(k_users);
        out.lambda.resize(k_users);
        for (Eigen::Index k = 0; k < k_users; ++k)
        {
            const double total = w.row(k).squaredNorm() + noise[k] * rho / power;
            const double interference = total - std::norm(w(k, k));
            if (!(total > 0.0) || !(interference > 0.0))
                throw DegenerateError("update_mu_lambda: user " + std::to_string(k) + " sees no signal and no noise");
            out.mu[k] = std::sqrt(1.0 + std::norm(w(k, k)) / interference);
            out.lambda[k] = out.mu[k] * w(k, k) / total;
        }
        return out;
    }

    AbDiagonals update_ab(const CovState &state, const RealVector &weights, const RealVector &noise, double power)
    {
        return update_ab(state.mu, state.lambda, weights, noise, power);
    }

    AbDiagonals update_ab(const RealVector &mu, const ComplexVector &lambda, const RealVector &weights,
                          const RealVector &noise, double power)
    {
        const auto k_users = mu.size();
        AbDiagonals out;
        out.a_bar.resize(k_users);
        out.b_bar.resize(k_users);
        double sum_c = 0.0;
        for (Eigen::Index k = 0; k < k_users; ++k)
        {
            out.a_bar[k] = weights[k] * mu[k] * std::conj(lambda[k]);
            out.b_bar[k] = weights[k] * std::norm(lambda[k]);
            sum_c += out.b_bar[k] * noise[k] / power;
        }
        if (!(sum_c > 0.0))
            throw DegenerateError("update_ab: every lambda vanished (zero-channel scenario)");
        out.a_bar /= sum_c;
        out.b_bar /= sum_c;
        return out;
    }

    ComplexMatrix update_w(const ComplexMatrix &q, const ComplexVector &a, const RealVector &b)
    {
        const auto k_users = q.rows();
        ComplexMatrix lhs = ComplexMatrix::Identity(k_users, k_users) + q * b.cast<cdouble>().asDiagonal();
        ComplexMatrix rhs = q * a.asDiagonal();
        ComplexMatrix w;
        try
        {
            w = solve_general(lhs, rhs);
        }
        catch (const SingularMatrixError &e)
        {
            throw InternalError(std::string("update_w: I + QB is singular: ") + e.what());
        }
        const double residual = (lhs * w - rhs).norm();
        if (residual > 1e-10 * std::max(rhs.norm(), std::numeric_limits<double>::min()))
            throw InternalError("update_w: linear solve residual too large");
        return w;
    }

    double power_rho(const ComplexMatrix &q, const ComplexVector &a, const RealVector &b, const ComplexMatrix &w)
    {
        ComplexMatrix c = -(b.cast<cdouble>().asDiagonal() * w);
        c.diagonal() += a;
        double rho = (c.adjoint() * q * c).trace().real();
        if (rho < 0.0)
        {
            const double ref = (a.cwiseAbs2().asDiagonal() * q.diagonal()).real().sum();
            if (rho < -1e-9 * ref)
                throw InternalError("power_rho: negative total power");
            rho = 0.0;
        }
        return rho;
    }

    namespace
    {
        constexpr std::size_t anderson_memory = 6;

        CovState from_coefficients(ComplexMatrix coefficients, const ComplexMatrix &q, const UserTerms &t)
        {
            CovState s;
            const auto k_users = q.rows();
            s.w = q * coefficients;
            s.rho = (coefficients.adjoint() * s.w).trace().real();
            if (!(s.rho > 0.0))
                throw DegenerateError("cov: patterns carry no power");
            // Unit total power; every derived quantity is invariant under a common scale.
            const double inv = 1.0 / std::sqrt(s.rho);
            s.coefficients = coefficients * inv;
            s.w *= inv;
            s.rho = 1.0;
            MuLambda ml = update_mu_lambda(s.w, s.rho, t.noise, t.power);
            s.mu = std::move(ml.mu);
            s.lambda = std::move(ml.lambda);
            s.objective = weighted_rate(sinr_from_overlaps(s.w, s.rho, t.noise, t.power), t.weights);
            s.a_diag = ComplexVector::Zero(k_users);
            s.b_diag = RealVector::Zero(k_users);
            return s;
        }

        void check_sizes(const CorrelationMatrix &corr, const Scenario &scenario)
        {
            if (scenario.num_users() != corr.num_users())
                throw InvalidArgument("cov: scenario and correlation disagree on the number of users");
        }
    }

    CovState init_state(const CorrelationMatrix &corr, const Scenario &scenario)
    {
        check_sizes(corr, scenario);
        const UserTerms t = user_terms(scenario);
        const ComplexMatrix &q = corr.q();
        const auto k_users = q.rows();
        CovState s;
        s.coefficients = ComplexMatrix::Identity(k_users, k_users);
        s.w = q;
        s.rho = q.trace().real();
        MuLambda ml = update_mu_lambda(s.w, s.rho, t.noise, t.power);
        s.mu = std::move(ml.mu);
        s.lambda = std::move(ml.lambda);
        s.objective = weighted_rate(sinr_from_overlaps(s.w, s.rho, t.noise, t.power), t.weights);
        s.a_diag = ComplexVector::Ones(k_users); // J_k = conj(H_k) is the update form with A = 1, B = 0
        s.b_diag = RealVector::Zero(k_users);
        return s;
    }

    CovState init_state_zf(const CorrelationMatrix &corr, const Scenario &scenario)
    {
        check_sizes(corr, scenario);
        const UserTerms t = user_terms(scenario);
        ZfDirections dir = corr_zf_directions(corr);
        const RealVector u = dir.u.diagonal().real();
        RealVector p = water_filling(u, t.noise, t.weights, t.power).powers;
        const double floor = 1e-6 * t.power / static_cast<double>(p.size());
        p = p.cwiseMax(floor);
        p *= t.power / p.sum();
        const RealVector amp = p.cwiseQuotient(u).cwiseSqrt();
        return from_coefficients(dir.u * amp.cast<cdouble>().asDiagonal(), corr.q(), t);
    }

    CovState bcd_step(const CovState &state, const ComplexMatrix &q, const UserTerms &t)
    {
        AbDiagonals ab = update_ab(state, t.weights, t.noise, t.power);
        // The pattern that maximises the surrogate carries conj(A-bar) on its own channel.
        const ComplexVector a = ab.a_bar.conjugate();
        CovState next;
        next.w = update_w(q, a, ab.b_bar);
        next.rho = power_rho(q, a, ab.b_bar, next.w);
        next.coefficients = -(ab.b_bar.cast<cdouble>().asDiagonal() * next.w);
        next.coefficients.diagonal() += a;
        MuLambda ml = update_mu_lambda(next.w, next.rho, t.noise, t.power);
        next.mu = std::move(ml.mu);
        next.lambda = std::move(ml.lambda);
        next.objective = weighted_rate(sinr_from_overlaps(next.w, next.rho, t.noise, t.power), t.weights);
        next.a_diag = std::move(ab.a_bar);
        next.b_diag = std::move(ab.b_bar);
        return next;
    }

    namespace
    {
        CovState normalized(CovState s)
        {
            const double inv = 1.0 / std::sqrt(s.rho);
            s.coefficients *= inv;
            s.w *= inv;
            // coefficients = conj(A) - B W stays true with A rescaled and B untouched.
            s.a_diag *= inv;
            s.rho = 1.0;
            return s;
        }

        std::optional<CovState> try_coefficients(ComplexMatrix c, const ComplexMatrix &q, const UserTerms &t)
        {
            try
            {
                return from_coefficients(std::move(c), q, t);
            }
            catch (const DegenerateError &)
            {
                return std::nullopt;
            }
        }

        CovResult iterate(CovState state, const ComplexMatrix &q, const UserTerms &t, const CovConfig &cfg,
                          StartKind start)
        {
            CovResult r;
            r.start = start;
            r.trace.push_back(state.objective);
            state = normalized(std::move(state));
            detail::AndersonMixer mixer(anderson_memory);
            bool last_extrapolated = false;
            for (int it = 1; it <= cfg.max_iters; ++it)
            {
                CovState next = normalized(bcd_step(state, q, t));
                last_extrapolated = false;
                if (cfg.extrapolate)
                {
                    const Eigen::Index kk = state.coefficients.size();
                    const ComplexVector x = state.coefficients.reshaped(kk, 1);
                    const ComplexVector g = next.coefficients.reshaped(kk, 1);
                    const ComplexVector mixed = mixer.propose(x, g);
                    auto cand = try_coefficients(mixed.reshaped(q.rows(), q.cols()), q, t);
                    if (cand && cand->objective > next.objective)
                    {
                        next = std::move(*cand);
                        last_extrapolated = true;
                        ++r.extrapolated_steps;
                    }
                }
                const double change = (next.objective - state.objective) /
                                      std::max(std::abs(state.objective), std::numeric_limits<double>::min());
                state = std::move(next);
                r.trace.push_back(state.objective);
                r.iterations = it;
                if (std::abs(change) < cfg.rel_tol)
                {
                    r.converged = true;
                    break;
                }
            }
            if (last_extrapolated)
            {
                // Finish on a plain step so the output has the exact A/B/W structure.
                state = normalized(bcd_step(state, q, t));
                r.trace.push_back(state.objective);
                ++r.iterations;
            }
            r.total_iterations = r.iterations;
            r.state = std::move(state);
            return r;
        }
    }

    CovState state_from_coefficients(const CorrelationMatrix &corr, const Scenario &scenario,
                                     const ComplexMatrix &coefficients)
    {
        check_sizes(corr, scenario);
        if (coefficients.rows() != corr.q().rows() || coefficients.cols() != corr.q().cols())
            throw InvalidArgument("state_from_coefficients: need a K x K coefficient matrix");
        return from_coefficients(coefficients, corr.q(), user_terms(scenario));
    }

    CovResult run_bcd_from(CovState start, const CorrelationMatrix &corr, const Scenario &scenario,
                           const CovConfig &config)
    {
        config.validate();
        check_sizes(corr, scenario);
        return iterate(std::move(start), corr.q(), user_terms(scenario), config, StartKind::matched_filter);
    }

    CovResult run_bcd(const CorrelationMatrix &corr, const Scenario &scenario, const CovConfig &config)
    {
        config.validate();
        check_sizes(corr, scenario);
        const UserTerms t = user_terms(scenario);
        const ComplexMatrix &q = corr.q();

        std::optional<CovResult> best;
        int total = 0;
        std::size_t tried = 0;
        for (auto &start : start_mixtures(q, t.noise, t.weights, t.power, config.starts))
        {
            CovState s0 = start.kind == StartKind::matched_filter ? init_state(corr, scenario)
                                                                  : from_coefficients(start.mixing, q, t);
            CovResult r = iterate(std::move(s0), q, t, config, start.kind);
            total += r.iterations;
            ++tried;
            if (!best || r.state.objective > best->state.objective)
                best = std::move(r);
        }
        if (config.refine_served_set)
        {
            int runs = 0;
            const StartKind winner = best->start;
            CovResult refined = detail::refine_served_set(
                std::move(*best),
                [&](const ComplexMatrix &x)
                {
                    CovResult r = iterate(from_coefficients(x, q, t), q, t, config, winner);
                    total += r.iterations;
                    return r;
                },
                [](const CovResult &r) -> const ComplexMatrix & { return r.state.coefficients; },
                [](const CovResult &r) { return r.state.objective; },
                [&](const ComplexMatrix &x, Eigen::Index k) { return x.col(k).dot(q * x.col(k)).real(); },
                [&](Eigen::Index k) { return ComplexVector(ComplexMatrix::Identity(q.rows(), q.cols()).col(k)); },
                runs);
            best = std::move(refined);
            tried += static_cast<std::size_t>(runs);
        }
        best->total_iterations = total;
        best->starts_tried = tried;
        return std::move(*best);
    }

    std::vector<BeamPattern> synthesize_patterns(const CovState &state, const CorrelationMatrix &corr, double power)
    {
        if (!(state.rho > 0.0))
            throw DegenerateError("synthesize_patterns: zero total power");
        if (!(power > 0.0))
            throw InvalidArgument("synthesize_patterns: power must be positive");
        const double scale = std::sqrt(power / state.rho);
        std::vector<BeamPattern> out;
        out.reserve(static_cast<std::size_t>(state.coefficients.cols()));
        for (Eigen::Index k = 0; k < state.coefficients.cols(); ++k)
            out.push_back(BeamPattern::conjugate_channels(corr.scenario_ptr(), state.coefficients.col(k) * scale));
        return out;
    }

    RateReport rates_from_overlaps(const ComplexMatrix &w, const RealVector &noise, const RealVector &weights)
    {
        const auto k_users = w.rows();
        RateReport r;
        r.sinr.resize(k_users);
        r.rates.resize(k_users);
        for (Eigen::Index k = 0; k < k_users; ++k)
        {
            const double desired = std::norm(w(k, k));
            const double interference = w.row(k).squaredNorm() - desired;
            r.sinr[k] = desired / (interference + noise[k]);
            r.rates[k] = std::log2(1.0 + r.sinr[k]);
            r.wsr += weights[k] * r.rates[k];
        }
        return r;
    }

    RateReport wsr_eval(const std::vector<BeamPattern> &patterns, const CorrelationMatrix &corr, const RealVector &noise,
                        const RealVector &weights)
    {
        const auto k_users = static_cast<Eigen::Index>(corr.num_users());
        if (static_cast<Eigen::Index>(patterns.size()) != k_users || noise.size() != k_users ||
            weights.size() != k_users)
            throw InvalidArgument("wsr_eval: need one pattern, noise and weight per user");
        ComplexMatrix w(k_users, k_users);
        for (Eigen::Index k = 0; k < k_users; ++k)
            for (Eigen::Index i = 0; i < k_users; ++i)
                w(i, k) = overlap(corr, static_cast<std::size_t>(i), patterns[static_cast<std::size_t>(k)]);
        return rates_from_overlaps(w, noise, weights);
    }
}
