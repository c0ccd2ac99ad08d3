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

#include "support.hpp"

#include "capa/correlation.hpp"
#include "capa/cov_solver.hpp"
#include "capa/error.hpp"
#include "capa/zf_solver.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace capa;
using namespace capa_test;

namespace
{
    // Surrogate for fixed (mu, lambda) as a function of the coefficients C, computed from Q directly:
    // sum_k alpha_k (2 mu_k Re(conj(lambda_k) w_kk) - |lambda_k|^2 (sum_i |w_ki|^2 + sigma_k^2 rho / P)).
    double surrogate(const ComplexMatrix &q, const ComplexMatrix &c, const RealVector &mu, const ComplexVector &lambda,
                     const UserTerms &t)
    {
        const ComplexMatrix w = q * c;
        const double rho = (c.adjoint() * q * c).trace().real();
        double f = 0.0;
        for (Eigen::Index k = 0; k < w.rows(); ++k)
            f += t.weights[k] * (2 * mu[k] * (std::conj(lambda[k]) * w(k, k)).real() -
                                 std::norm(lambda[k]) * (w.row(k).squaredNorm() + t.noise[k] * rho / t.power));
        return f;
    }

    CovState advanced_state(const CorrelationMatrix &corr, const Scenario &sc, int steps)
    {
        const UserTerms t = user_terms(sc);
        CovState s = init_state(corr, sc);
        for (int i = 0; i < steps; ++i)
            s = bcd_step(s, corr.q(), t);
        return s;
    }

    CovConfig single_run()
    {
        CovConfig c;
        c.starts = single_start(StartKind::matched_filter);
        c.refine_served_set = false;
        return c;
    }
}

TEST_CASE("single-user initial state", "[cov]")
{
    const Scenario sc = seeded_scenario(1, 21);
    const auto corr = correlation_matrix(sc, 20);
    const CovState s = init_state(corr, sc);
    const double q = corr.q()(0, 0).real();
    CHECK(s.w(0, 0) == corr.q()(0, 0));
    CHECK(s.rho == Catch::Approx(q).epsilon(1e-15));
    CHECK(rel(s.mu[0], std::sqrt(1 + sc.transmit_power() * q / sc.users[0].noise_power)) < 1e-12);
}

TEST_CASE("matched-filter start agrees with quadrature of the patterns", "[cov]")
{
    const Scenario sc = seeded_scenario(8, 22);
    const auto corr = correlation_matrix(sc, 20);
    const CovState s = init_state(corr, sc);
    CHECK((s.w - corr.q()).norm() == 0.0);

    const auto grid = plain_grid(sc.aperture, gauss_legendre_rule(20));
    const ComplexMatrix w = oracle_overlaps(sc, grid, ComplexMatrix::Identity(8, 8));
    const double rho = oracle_power(sc, grid, ComplexMatrix::Identity(8, 8));
    const double p = sc.transmit_power();
    for (Eigen::Index k = 0; k < 8; ++k)
    {
        const double desired = std::norm(w(k, k));
        const double interference = w.row(k).squaredNorm() - desired;
        const double noise = sc.users[static_cast<std::size_t>(k)].noise_power * rho / p;
        const double mu = std::sqrt(1 + desired / (interference + noise));
        const cdouble lambda = mu * w(k, k) / (interference + desired + noise);
        CHECK(rel(s.mu[k], mu) < 1e-8);
        CHECK(rel(s.lambda[k], lambda) < 1e-8);
    }
}

TEST_CASE("update_ab", "[cov]")
{
    RealVector one = RealVector::Ones(1);
    ComplexVector lam = ComplexVector::Ones(1);
    const AbDiagonals ab = update_ab(one, lam, one, RealVector::Constant(1, 0.3), 0.3);
    CHECK(std::abs(ab.a_bar[0] - 1.0) < 1e-15);
    CHECK(ab.b_bar[0] == Catch::Approx(1.0).epsilon(1e-15));

    const Scenario sc = seeded_scenario(6, 23);
    const auto corr = correlation_matrix(sc, 20);
    const CovState s = init_state(corr, sc);
    const UserTerms t = user_terms(sc);
    const AbDiagonals base = update_ab(s, t.weights, t.noise, t.power);
    const AbDiagonals scaled = update_ab(s, 7.5 * t.weights, t.noise, t.power);
    CHECK((base.a_bar - scaled.a_bar).norm() <= 1e-14 * base.a_bar.norm());
    CHECK((base.b_bar - scaled.b_bar).norm() <= 1e-14 * base.b_bar.norm());

    CHECK_THROWS_AS(update_ab(s.mu, ComplexVector::Zero(6), t.weights, t.noise, t.power), DegenerateError);
}

TEST_CASE("update_ab stays finite over many scenarios", "[cov]")
{
    for (std::uint64_t seed = 1; seed <= 100; ++seed)
    {
        const Scenario sc = seeded_scenario(8, seed);
        const auto corr = correlation_matrix(sc, 20);
        const UserTerms t = user_terms(sc);
        const AbDiagonals ab = update_ab(init_state(corr, sc), t.weights, t.noise, t.power);
        CHECK(all_finite(ab.a_bar));
        CHECK(ab.b_bar.allFinite());
        CHECK(ab.b_bar.minCoeff() >= 0.0);
    }
}

TEST_CASE("update_w", "[cov]")
{
    const ComplexMatrix x = random_matrix(8, 8, 31);
    const ComplexMatrix q = x * x.adjoint();
    const ComplexVector a = random_matrix(8, 1, 32).col(0);
    const RealVector zero = RealVector::Zero(8);
    CHECK((update_w(q, a, zero) - q * a.asDiagonal()).norm() <= 1e-12 * q.norm());

    for (std::uint64_t seed = 33; seed < 43; ++seed)
    {
        const RealVector b = random_matrix(8, 1, seed).col(0).cwiseAbs();
        const ComplexMatrix w = update_w(q, a, b);
        const ComplexMatrix qa = q * a.asDiagonal();
        const ComplexMatrix lhs = (ComplexMatrix::Identity(8, 8) + q * b.cast<cdouble>().asDiagonal()) * w;
        CHECK((lhs - qa).norm() <= 1e-10 * qa.norm());
    }

    ComplexMatrix q1(1, 1);
    q1 << 2.5;
    ComplexVector a1(1);
    a1 << cdouble(0.3, -1.1);
    RealVector b1(1);
    b1 << 0.7;
    CHECK(rel(update_w(q1, a1, b1)(0, 0), 2.5 * a1[0] / (1 + 2.5 * 0.7)) < 1e-14);
}

TEST_CASE("power_rho", "[cov]")
{
    const Scenario sc = seeded_scenario(5, 24);
    const auto corr = correlation_matrix(sc, 20);
    const ComplexMatrix &q = corr.q();
    const ComplexMatrix w = random_matrix(5, 5, 5);
    CHECK(rel(power_rho(q, ComplexVector::Ones(5), RealVector::Zero(5), w), q.trace().real()) < 1e-14);
    CHECK(power_rho(q, ComplexVector::Zero(5), RealVector::Zero(5), w) == 0.0);

    // mid-iteration: rho of the step equals quadrature of the coefficients it produced
    const UserTerms t = user_terms(sc);
    const CovState s = advanced_state(corr, sc, 3);
    const CovState next = bcd_step(s, q, t);
    const auto grid = plain_grid(sc.aperture, gauss_legendre_rule(20));
    CHECK(rel(next.rho, oracle_power(sc, grid, next.coefficients)) < 1e-6);
    CHECK(rel(power_rho(q, next.a_diag.conjugate(), next.b_diag, next.w), next.rho) < 1e-12);
}

TEST_CASE("update_mu_lambda", "[cov]")
{
    // interference-free columns
    ComplexMatrix w = ComplexMatrix::Zero(3, 3);
    w.diagonal() << cdouble(1, 2), cdouble(-0.5, 0.1), cdouble(3, 0);
    const RealVector noise = RealVector::Constant(3, 0.2);
    const double rho = 1.7, p = 0.4;
    const MuLambda ml = update_mu_lambda(w, rho, noise, p);
    for (int k = 0; k < 3; ++k)
    {
        CHECK(rel(ml.mu[k], std::sqrt(1 + std::norm(w(k, k)) * p / (noise[k] * rho))) < 1e-14);
        CHECK(ml.mu[k] >= 1.0);
    }

    // against quadrature of the patterns after a few steps
    const Scenario sc = seeded_scenario(6, 25);
    const auto corr = correlation_matrix(sc, 20);
    const CovState s = advanced_state(corr, sc, 4);
    const auto grid = plain_grid(sc.aperture, gauss_legendre_rule(20));
    const ComplexMatrix wq = oracle_overlaps(sc, grid, s.coefficients);
    const double rq = oracle_power(sc, grid, s.coefficients);
    const UserTerms t = user_terms(sc);
    const MuLambda direct = update_mu_lambda(wq, rq, t.noise, t.power);
    CHECK((direct.mu - s.mu).norm() <= 1e-8 * s.mu.norm());
    CHECK((direct.lambda - s.lambda).norm() <= 1e-8 * s.lambda.norm());

    CHECK_THROWS_AS(update_mu_lambda(ComplexMatrix::Zero(2, 2), 0.0, RealVector::Ones(2), 1.0), DegenerateError);
}

TEST_CASE("W update maximises the surrogate for fixed auxiliaries", "[cov]")
{
    const Scenario sc = seeded_scenario(8, 26);
    const auto corr = correlation_matrix(sc, 20);
    const UserTerms t = user_terms(sc);
    const CovState s = advanced_state(corr, sc, 2);
    const AbDiagonals ab = update_ab(s.mu, s.lambda, t.weights, t.noise, t.power);
    const ComplexVector a = ab.a_bar.conjugate();
    const ComplexMatrix w = update_w(corr.q(), a, ab.b_bar);
    ComplexMatrix c = -(ab.b_bar.cast<cdouble>().asDiagonal() * w);
    c.diagonal() += a;

    const double best = surrogate(corr.q(), c, s.mu, s.lambda, t);
    for (std::uint64_t seed = 1; seed <= 20; ++seed)
    {
        const ComplexMatrix e = random_matrix(8, 8, seed);
        const ComplexMatrix moved = c + 1e-4 * c.norm() / e.norm() * e;
        CHECK(surrogate(corr.q(), moved, s.mu, s.lambda, t) <= best + 1e-8 * std::abs(best));
    }
    for (double scale : {0.9, 1.1})
        CHECK(surrogate(corr.q(), scale * c, s.mu, s.lambda, t) < best);

    // a plain step lands on the same maximiser
    const CovState next = bcd_step(s, corr.q(), t);
    CHECK((next.coefficients - c).norm() <= 1e-10 * c.norm());
}

TEST_CASE("single user converges to the closed form", "[cov]")
{
    for (std::uint64_t seed : {1, 2, 3})
    {
        const Scenario sc = seeded_scenario(1, seed);
        const auto corr = correlation_matrix(sc, 20);
        const CovResult r = run_bcd(corr, sc);
        const auto patterns = synthesize_patterns(r.state, corr, sc.transmit_power());
        const UserTerms t = user_terms(sc);
        const RateReport rep = wsr_eval(patterns, corr, t.noise, t.weights);
        const double closed = std::log2(1 + sc.transmit_power() * corr.q()(0, 0).real() / sc.users[0].noise_power);
        CHECK(rel(rep.rates[0], closed) < 1e-6);
        CHECK(rel(rep.wsr, closed) < 1e-6); // alpha = 1 for K = 1
    }
}

TEST_CASE("objective trace never decreases", "[cov]")
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed)
    {
        const Scenario sc = seeded_scenario(8, seed);
        const auto corr = correlation_matrix(sc, 20);
        const CovResult r = run_bcd(corr, sc, single_run());
        for (std::size_t i = 1; i < r.trace.size(); ++i)
            CHECK(r.trace[i] >= r.trace[i - 1] * (1 - 1e-9));
        CHECK(r.converged);
        CHECK(r.iterations <= 200);
    }
}

TEST_CASE("synthesised patterns meet the budget and the optimality structure", "[cov]")
{
    const Scenario sc = seeded_scenario(8, 27);
    const auto corr = correlation_matrix(sc, 20);
    const CovResult r = run_bcd(corr, sc);
    const double p = sc.transmit_power();
    const auto patterns = synthesize_patterns(r.state, corr, p);
    REQUIRE(patterns.size() == 8);

    double via_q = 0.0;
    ComplexMatrix scaled(8, 8);
    for (std::size_t k = 0; k < 8; ++k)
    {
        via_q += pattern_power(corr, patterns[k]);
        scaled.col(static_cast<Eigen::Index>(k)) = patterns[k].coefficients();
    }
    CHECK(rel(via_q, p) < 1e-9);
    const auto grid = plain_grid(sc.aperture, gauss_legendre_rule(20));
    CHECK(rel(oracle_power(sc, grid, scaled), p) < 1e-6);

    // J_k(s) = conj(A_k) conj(H_k(s)) - sum_i B_i w(i, k) conj(H_i(s)) at random aperture points
    const CovState &st = r.state;
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> ux(-0.25, 0.25);
    std::vector<Vec3> pts;
    for (int i = 0; i < 100; ++i)
        pts.push_back({ux(rng), ux(rng), 0.0});
    for (Eigen::Index k = 0; k < 8; ++k)
    {
        const auto pattern = BeamPattern::conjugate_channels(corr.scenario_ptr(), st.coefficients.col(k));
        double peak = 0.0, worst = 0.0;
        for (const auto &s : pts)
        {
            const cdouble j = pattern(s);
            cdouble structure = std::conj(st.a_diag[k]) * std::conj(split_channel(sc, static_cast<std::size_t>(k), s));
            for (Eigen::Index i = 0; i < 8; ++i)
                structure -= st.b_diag[i] * st.w(i, k) * std::conj(split_channel(sc, static_cast<std::size_t>(i), s));
            peak = std::max(peak, std::abs(j));
            worst = std::max(worst, std::abs(j - structure));
        }
        CHECK(worst <= 1e-8 * peak); // switched-off users have J_k = 0
    }

    // scaling leaves the SINRs of the sigma^2 rho / P form unchanged
    const UserTerms t = user_terms(sc);
    const RealVector before = sinr_from_overlaps(st.w, st.rho, t.noise, t.power);
    const RateReport after = wsr_eval(patterns, corr, t.noise, t.weights);
    CHECK((before - after.sinr).cwiseAbs().maxCoeff() <= 1e-9 * after.sinr.cwiseAbs().maxCoeff());
}

TEST_CASE("wsr_eval through Q and through quadrature", "[cov]")
{
    const Scenario sc = seeded_scenario(8, 28);
    const auto corr = correlation_matrix(sc, 20);
    const CovResult r = run_bcd(corr, sc);
    const auto patterns = synthesize_patterns(r.state, corr, sc.transmit_power());
    const auto detached = std::make_shared<const Scenario>(sc);
    std::vector<BeamPattern> far;
    for (const auto &pt : patterns)
        far.push_back(BeamPattern::conjugate_channels(detached, pt.coefficients()));
    const UserTerms t = user_terms(sc);
    const double exact = wsr_eval(patterns, corr, t.noise, t.weights).wsr;
    const double quad = wsr_eval(far, corr, t.noise, t.weights).wsr;
    CHECK(rel(quad, exact) < 1e-6);
    CHECK(rel(exact, r.state.objective) < 1e-9);
}

TEST_CASE("main loop performs no quadrature", "[cov]")
{
    const Scenario sc = seeded_scenario(8, 29);
    const auto corr = correlation_matrix(sc, 20);
    reset_quadrature_counters();
    const CovResult r = run_bcd(corr, sc);
    synthesize_patterns(r.state, corr, sc.transmit_power());
    CHECK(quadrature_counters().integrals == 0);
    CHECK(quadrature_counters().point_evaluations == 0);
}

TEST_CASE("multi-start result dominates the single starts", "[cov]")
{
    for (std::uint64_t seed = 40; seed < 50; ++seed)
    {
        const Scenario sc = seeded_scenario(8, seed);
        const auto corr = correlation_matrix(sc, 20);
        const double best = run_bcd(corr, sc).state.objective;
        CHECK(best >= run_bcd(corr, sc, single_run()).state.objective * (1 - 1e-12));
        CHECK(best >= zf_solve(corr, sc).wsr - 1e-9);
    }
}

TEST_CASE("state_from_coefficients and run_bcd_from", "[cov]")
{
    const Scenario sc = seeded_scenario(6, 51);
    const auto corr = correlation_matrix(sc, 20);
    const ZfSolution zf = zf_solve(corr, sc);
    ComplexMatrix c(6, 6);
    for (Eigen::Index k = 0; k < 6; ++k)
        c.col(k) = zf.patterns[static_cast<std::size_t>(k)].coefficients();
    const CovState s = state_from_coefficients(corr, sc, c);
    CHECK(s.rho == Catch::Approx(1.0));
    CHECK(rel(s.objective, zf.wsr) < 1e-9);
    const CovResult r = run_bcd_from(s, corr, sc, single_run());
    CHECK(r.state.objective >= zf.wsr * (1 - 1e-12));

    CHECK_THROWS_AS(state_from_coefficients(corr, sc, ComplexMatrix::Zero(6, 6)), DegenerateError);
}

TEST_CASE("config validation", "[cov]")
{
    CovConfig c;
    CHECK_NOTHROW(c.validate());
    c.rel_tol = 0.0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = CovConfig{};
    c.max_iters = 0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);

    const Scenario sc = seeded_scenario(3, 52);
    const auto corr = correlation_matrix(sc, 20);
    CHECK_THROWS_AS(init_state(corr, seeded_scenario(4, 52)), InvalidArgument);
}
