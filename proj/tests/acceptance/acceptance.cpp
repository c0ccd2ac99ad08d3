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

// One PASS/FAIL line per acceptance criterion. Exit status is the number of failures.
// Arguments, if any, select criteria by number.

#include "support.hpp"

#include "capa/correlation.hpp"
#include "capa/cov_solver.hpp"
#include "capa/fourier.hpp"
#include "capa/quadrature.hpp"
#include "capa/zf_solver.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cstdlib>
#include <cstdio>
#include <functional>
#include <map>
#include <string>

using namespace capa;
using namespace capa_test;

namespace
{
    struct Outcome
    {
        bool pass = false;
        std::string detail;
    };

    std::string fmt(const char *f, auto... args)
    {
        char buf[512];
        std::snprintf(buf, sizeof buf, f, args...);
        return buf;
    }

    double mean(const std::vector<double> &v)
    {
        double s = 0.0;
        for (double x : v)
            s += x;
        return v.empty() ? 0.0 : s / static_cast<double>(v.size());
    }

    double seconds_since(std::chrono::steady_clock::time_point t0)
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }

    constexpr int anchor_seeds = 200;

    // Default setup per seed: CoV and Corr-ZF at three budgets on one Q, MIMO at 100 and 1000 mA^2.
    struct AnchorRun
    {
        std::map<double, double> cov, zf, mimo, mimo_zf;
    };

    const std::vector<AnchorRun> &anchor_runs()
    {
        static const std::vector<AnchorRun> runs = [] {
            std::vector<AnchorRun> out;
            for (int seed = 1; seed <= anchor_seeds; ++seed)
            {
                const Scenario base = seeded_scenario(8, static_cast<std::uint64_t>(seed));
                const CorrelationMatrix corr = correlation_matrix(base, 20);
                AnchorRun r;
                for (double p : {10.0, 100.0, 1000.0})
                {
                    Scenario sc = base;
                    sc.power_budget_mA2 = p;
                    r.cov[p] = run_bcd(corr, sc).state.objective;
                    r.zf[p] = zf_solve(corr, sc).wsr;
                    if (p > 10.0)
                    {
                        r.mimo[p] = mimo_solve(sc, {}, false).wsr;
                        r.mimo_zf[p] = mimo_solve(sc, {}, true).wsr;
                    }
                }
                out.push_back(std::move(r));
            }
            return out;
        }();
        return runs;
    }

    Outcome anchor(double power, double cov_ref, double zf_ref, double mimo_ref, double mimo_zf_ref)
    {
        std::vector<double> cov, zf, mimo, mimo_zf;
        for (const AnchorRun &r : anchor_runs())
        {
            cov.push_back(r.cov.at(power));
            zf.push_back(r.zf.at(power));
            mimo.push_back(r.mimo.at(power));
            mimo_zf.push_back(r.mimo_zf.at(power));
        }
        const double m[4] = {mean(cov), mean(zf), mean(mimo), mean(mimo_zf)};
        const double ref[4] = {cov_ref, zf_ref, mimo_ref, mimo_zf_ref};
        bool ok = true;
        for (int i = 0; i < 4; ++i)
            ok = ok && std::abs(m[i] - ref[i]) <= 0.5;
        return {ok, fmt("%d seeds, P=%g mA^2: CoV %.3f (%.1f), Corr-ZF %.3f (%.1f), MIMO-FP %.3f (%.1f), "
                        "MIMO-ZF %.3f (%.1f), tolerance 0.5",
                        anchor_seeds, power, m[0], ref[0], m[1], ref[1], m[2], ref[2], m[3], ref[3])};
    }

    Outcome criterion_1() { return anchor(100.0, 7.8, 7.0, 6.4, 5.4); }
    Outcome criterion_2() { return anchor(1000.0, 10.5, 10.2, 9.0, 8.5); }

    Outcome criterion_3()
    {
        const Aperture ap{0.5, 0.5};
        const std::size_t n1 = truncation(ap, 3e8 / 2.4e9).size(), n2 = truncation(ap, 3e8 / 7.8e9).size(),
                          n3 = truncation(ap, 3e8 / 15e9).size();
        return {n1 == 81 && n2 == 729 && n3 == 2601, fmt("N_F = %zu / %zu / %zu", n1, n2, n3)};
    }

    // Criteria 4, 5 and 12 share these solves.
    struct ConvergenceRun
    {
        std::uint64_t seed = 0;
        Scenario scenario;
        std::shared_ptr<CorrelationMatrix> corr;
        CovResult result;
        CovResult plain; // single matched-filter start, no extrapolation
    };

    const std::vector<ConvergenceRun> &convergence_runs()
    {
        static const std::vector<ConvergenceRun> runs = [] {
            std::vector<ConvergenceRun> out;
            const std::size_t sizes[3] = {2, 4, 8};
            for (std::uint64_t seed = 1; seed <= 100; ++seed)
            {
                ConvergenceRun r;
                r.seed = seed;
                r.scenario = seeded_scenario(sizes[seed % 3], 1000 + seed);
                r.corr = std::make_shared<CorrelationMatrix>(correlation_matrix(r.scenario, 20));
                r.result = run_bcd(*r.corr, r.scenario);
                CovConfig plain;
                plain.starts = single_start(StartKind::matched_filter);
                plain.refine_served_set = false;
                plain.extrapolate = false;
                r.plain = run_bcd(*r.corr, r.scenario, plain);
                out.push_back(std::move(r));
            }
            return out;
        }();
        return runs;
    }

    bool monotone(const std::vector<double> &trace)
    {
        for (std::size_t i = 1; i < trace.size(); ++i)
            if (trace[i] < trace[i - 1] - 1e-9 * std::abs(trace[i - 1]))
                return false;
        return true;
    }

    // First iteration whose relative change is below tol; -1 if none.
    int settled_at(const std::vector<double> &trace, double tol)
    {
        for (std::size_t i = 1; i < trace.size(); ++i)
            if (std::abs(trace[i] - trace[i - 1]) < tol * std::abs(trace[i - 1]))
                return static_cast<int>(i);
        return -1;
    }

    Outcome criterion_4()
    {
        int monotone_runs = 0, converged = 0, worst = 0;
        for (const ConvergenceRun &r : convergence_runs())
        {
            monotone_runs += monotone(r.result.trace) && monotone(r.plain.trace);
            const int at = settled_at(r.result.trace, 1e-5);
            converged += at > 0 && at <= 200;
            worst = std::max(worst, at);
        }
        return {monotone_runs == 100 && converged >= 99,
                fmt("K in {2,4,8}: monotone traces on %d/100 seeds (default and plain runs), converged to 1e-5 "
                    "within 200 iterations on %d/100 (slowest %d)",
                    monotone_runs, converged, worst)};
    }

    Outcome criterion_5()
    {
        const PlainGrid grid = plain_grid(Aperture{0.5, 0.5}, gauss_legendre_rule(32));
        double worst_q = 0.0, worst_quad = 0.0;
        for (const ConvergenceRun &r : convergence_runs())
        {
            const double p = r.scenario.transmit_power();
            const auto cov = synthesize_patterns(r.result.state, *r.corr, p);
            const auto zf = zf_solve(*r.corr, r.scenario).patterns;
            for (const auto *patterns : {&cov, &zf})
            {
                const auto k = static_cast<Eigen::Index>(patterns->size());
                ComplexMatrix c(k, k);
                double via_q = 0.0;
                for (Eigen::Index j = 0; j < k; ++j)
                {
                    via_q += pattern_power(*r.corr, (*patterns)[static_cast<std::size_t>(j)]);
                    c.col(j) = (*patterns)[static_cast<std::size_t>(j)].coefficients();
                }
                worst_q = std::max(worst_q, rel(via_q, p));
                worst_quad = std::max(worst_quad, rel(oracle_power(r.scenario, grid, c), p));
            }
        }
        return {worst_q < 1e-9 && worst_quad < 1e-6,
                fmt("CoV and Corr-ZF on 100 seeds: worst relative power error %.2e via Q, %.2e via 32x32 quadrature",
                    worst_q, worst_quad)};
    }

    Outcome criterion_6()
    {
        const PlainGrid grid = plain_grid(Aperture{0.5, 0.5}, gauss_legendre_rule(32));
        int used = 0;
        double worst = 0.0;
        for (std::uint64_t seed = 1; seed <= 100; ++seed)
        {
            const Scenario sc = seeded_scenario(8, 2000 + seed);
            const CorrelationMatrix corr = correlation_matrix(sc, 20);
            const RealVector ev = Eigen::SelfAdjointEigenSolver<ComplexMatrix>(corr.q()).eigenvalues();
            if (!(ev.minCoeff() > 0.0) || ev.maxCoeff() / ev.minCoeff() >= 1e8)
                continue;
            ++used;
            const ZfSolution zf = zf_solve(corr, sc);
            ComplexMatrix c(8, 8);
            for (Eigen::Index k = 0; k < 8; ++k)
                c.col(k) = zf.patterns[static_cast<std::size_t>(k)].coefficients();
            const ComplexMatrix w = oracle_overlaps(sc, grid, c);
            for (Eigen::Index k = 0; k < 8; ++k)
            {
                if (!(zf.powers[k] > 0.0))
                    continue;
                for (Eigen::Index i = 0; i < 8; ++i)
                    if (i != k)
                        worst = std::max(worst, std::abs(w(i, k)) / std::abs(w(k, k)));
            }
        }
        return {used >= 90 && worst < 1e-6,
                fmt("%d/100 seeds with cond(Q) < 1e8: worst |w_ik| / |w_kk| = %.2e (limit 1e-6)", used, worst)};
    }

    Outcome criterion_7()
    {
        const Scenario two = fixed_scenario({{2, 1, 18}, {-3, -2, 25}});
        const double cov = run_bcd(correlation_matrix(two, 20), two).state.objective;
        const PlainGrid grid = plain_grid(two.aperture, gauss_legendre_rule(40));
        ComplexMatrix g(static_cast<Eigen::Index>(grid.points.size()), 2);
        for (std::size_t m = 0; m < grid.points.size(); ++m)
            for (std::size_t k = 0; k < 2; ++k)
                g(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k)) =
                    std::sqrt(grid.weights[m]) * split_channel(two, k, grid.points[m]);
        const RealVector noise = RealVector::Map(two.noise_powers().data(), 2);
        const RealVector weights = RealVector::Map(two.weights().data(), 2);
        const double oracle = oracle_wsr(g, noise, weights, two.transmit_power());

        const Scenario one = fixed_scenario({{1.5, -2, 22}});
        const CorrelationMatrix c1 = correlation_matrix(one, 20);
        const double single = run_bcd(c1, one).state.objective;
        const double closed = std::log2(1 + one.transmit_power() * c1.q()(0, 0).real() / one.users[0].noise_power);
        return {rel(cov, oracle) < 0.01 && rel(single, closed) < 1e-6,
                fmt("2 users: CoV %.6f vs grid oracle %.6f (rel %.2e, limit 1e-2); 1 user: %.9f vs closed form %.9f "
                    "(rel %.2e, limit 1e-6)",
                    cov, oracle, rel(cov, oracle), single, closed, rel(single, closed))};
    }

    Outcome criterion_8()
    {
        const int seeds = 100;
        int violations = 0;
        double worst_gap = 0.0, worst_fourier = 0.0;
        for (int seed = 1; seed <= seeds; ++seed)
        {
            const Scenario sc = seeded_scenario(8, static_cast<std::uint64_t>(seed));
            const CorrelationMatrix corr = correlation_matrix(sc, 20);
            const double cov = run_bcd(corr, sc).state.objective;
            const double zf = zf_solve(corr, sc).wsr;
            const double fp = fourier_solve(sc, {}, false).continuous.wsr;
            const double fz = fourier_solve(sc, {}, true).continuous.wsr;
            const double gaps[3] = {zf - cov, fp - cov, fz - zf};
            for (double g : gaps)
            {
                worst_gap = std::max(worst_gap, g);
                violations += g > 1e-3;
            }
            worst_fourier = std::max(worst_fourier, rel(fp, cov));
            violations += rel(fp, cov) >= 0.05;
        }
        return {violations == 0, fmt("%d seeds: %d violations; largest ordering excess %.2e (slack 1e-3), largest "
                                     "Fourier-FP shortfall %.2f%% of CoV (limit 5%%)",
                                     seeds, violations, worst_gap, 100 * worst_fourier)};
    }

    Outcome criterion_9()
    {
        double gap[3] = {};
        const double powers[3] = {10.0, 100.0, 1000.0};
        for (int i = 0; i < 3; ++i)
        {
            std::vector<double> d;
            for (const AnchorRun &r : anchor_runs())
                d.push_back(r.cov.at(powers[i]) - r.zf.at(powers[i]));
            gap[i] = mean(d);
        }
        return {gap[0] > gap[1] && gap[1] > gap[2],
                fmt("%d seeds: mean CoV - Corr-ZF gap %.4f / %.4f / %.4f at P = 10 / 100 / 1000 mA^2", anchor_seeds,
                    gap[0], gap[1], gap[2])};
    }

    // Single start, no refinement or extrapolation, exactly max_iters iterations.
    DiscreteConfig fixed_work_discrete(int iters)
    {
        DiscreteConfig c;
        c.starts = single_start(StartKind::matched_filter);
        c.refine_served_set = false;
        c.extrapolate = false;
        c.max_iters = iters;
        c.rel_tol = 1e-300;
        return c;
    }

    Outcome criterion_10()
    {
        // CoV: set-up plus a fixed-work solve, frequencies interleaved per seed so that machine drift hits all
        // three alike; 3 warm-ups, then seeds 1..100. The default multi-start solve is timed too, for the report
        // only: its iteration count follows how strongly the channels are correlated, which drops with frequency.
        CovConfig fixed;
        fixed.starts = single_start(StartKind::matched_filter);
        fixed.refine_served_set = false;
        fixed.extrapolate = false;
        fixed.max_iters = 200;
        fixed.rel_tol = 1e-300;
        const double freqs[3] = {2.4e9, 7.8e9, 15e9};
        std::vector<double> cov_time(3, 0.0), default_time(3, 0.0);
        bool no_quadrature = true;
        auto one = [&](double f, std::uint64_t seed, const CovConfig &cfg) {
            Scenario sc = seeded_scenario(8, seed);
            sc.frequency = f;
            const auto t0 = std::chrono::steady_clock::now();
            const CorrelationMatrix corr = correlation_matrix(sc, 20);
            reset_quadrature_counters();
            (void)run_bcd(corr, sc, cfg);
            no_quadrature = no_quadrature && quadrature_counters().integrals == 0 &&
                            quadrature_counters().point_evaluations == 0;
            return seconds_since(t0);
        };
        for (int w = 0; w < 3; ++w)
            for (double f : freqs)
                (void)one(f, 1, fixed);
        for (std::uint64_t seed = 1; seed <= 100; ++seed)
            for (int i = 0; i < 3; ++i)
                cov_time[static_cast<std::size_t>(i)] += one(freqs[i], seed, fixed) / 100;
        for (std::uint64_t seed = 1; seed <= 20; ++seed)
            for (int i = 0; i < 3; ++i)
                default_time[static_cast<std::size_t>(i)] += one(freqs[i], seed, CovConfig{}) / 20;
        const double lo = *std::min_element(cov_time.begin(), cov_time.end());
        const double hi = *std::max_element(cov_time.begin(), cov_time.end());

        // Fourier: five fixed-work iterations at both frequencies
        FourierConfig fc;
        fc.solver = fixed_work_discrete(5);
        std::vector<double> fourier_time;
        for (double f : {2.4e9, 15e9})
        {
            Scenario sc = seeded_scenario(8, 1);
            sc.frequency = f;
            (void)fourier_solve(sc, fc, false);
            std::vector<double> t;
            for (int i = 0; i < 3; ++i)
            {
                const auto t0 = std::chrono::steady_clock::now();
                (void)fourier_solve(sc, fc, false);
                t.push_back(seconds_since(t0));
            }
            fourier_time.push_back(mean(t));
        }
        const double ratio = fourier_time[1] / fourier_time[0];
        return {(hi - lo) / lo < 0.2 && ratio >= 5.0 && no_quadrature,
                fmt("fixed work: CoV mean %.4f / %.4f / %.4f s at 2.4 / 7.8 / 15 GHz (spread %.1f%%, limit 20%%), "
                    "Fourier %.4f s -> %.4f s at 2.4 -> 15 GHz (x%.1f, limit x5); CoV quadrature after set-up: %s; "
                    "default CoV solve %.4f / %.4f / %.4f s",
                    cov_time[0], cov_time[1], cov_time[2], 100 * (hi - lo) / lo, fourier_time[0], fourier_time[1],
                    ratio, no_quadrature ? "none" : "some", default_time[0], default_time[1], default_time[2])};
    }

    Outcome criterion_11()
    {
        Scenario sc = fixed_scenario({{1, 1, 30}, {2, 2, 30}, {0, 0, 30}, {2, 0, 30}, {0, 2, 30}});
        sc.frequency = 7e9;
        sc.aperture = Aperture{std::sqrt(0.5), std::sqrt(0.5)};
        const ComplexMatrix q10 = correlation_at_order(sc, 10), q64 = correlation_at_order(sc, 64);
        double worst = 0.0;
        for (Eigen::Index i = 0; i < 5; ++i)
            for (Eigen::Index j = i; j < 5; ++j)
                worst = std::max(worst, std::abs(q10(i, j) - q64(i, j)) / std::abs(q64(i, j)));
        return {worst < 1e-4, fmt("5 users around [1,1,30] at 7 GHz: worst relative error M=10 vs M=64 is %.2e "
                                  "(limit 1e-4)",
                                  worst)};
    }

    Outcome criterion_12()
    {
        std::mt19937_64 rng(12);
        std::uniform_real_distribution<double> u(-0.25, 0.25);
        std::vector<Vec3> pts;
        for (int i = 0; i < 100; ++i)
            pts.push_back({u(rng), u(rng), 0.0});
        int checked = 0;
        double worst = 0.0;
        for (const ConvergenceRun &r : convergence_runs())
        {
            if (!r.result.converged)
                continue;
            ++checked;
            const CovState &st = r.result.state;
            const auto k_users = st.coefficients.cols();
            for (Eigen::Index k = 0; k < k_users; ++k)
            {
                const BeamPattern pattern = BeamPattern::conjugate_channels(r.corr->scenario_ptr(), st.coefficients.col(k));
                double peak = 0.0, err = 0.0;
                for (const Vec3 &s : pts)
                {
                    cdouble structure = std::conj(st.a_diag[k]) * std::conj(split_channel(r.scenario, static_cast<std::size_t>(k), s));
                    for (Eigen::Index i = 0; i < k_users; ++i)
                        structure -= st.b_diag[i] * st.w(i, k) * std::conj(split_channel(r.scenario, static_cast<std::size_t>(i), s));
                    const cdouble j = pattern(s);
                    peak = std::max(peak, std::abs(j));
                    err = std::max(err, std::abs(j - structure));
                }
                if (peak > 0.0)
                    worst = std::max(worst, err / peak);
                else if (err > 0.0)
                    worst = std::max(worst, 1.0);
            }
        }
        return {checked >= 99 && worst < 1e-8,
                fmt("%d converged solves, 100 points each: worst residual %.2e relative to the pattern peak "
                    "(limit 1e-8)",
                    checked, worst)};
    }

    Outcome criterion_13()
    {
        std::mt19937_64 rng(13);
        std::uniform_real_distribution<double> logu(-3.0, 1.0), unit(0.05, 1.0);
        std::uniform_int_distribution<int> size(1, 8);
        int mismatched = 0;
        double worst = 0.0;
        for (int trial = 0; trial < 1000; ++trial)
        {
            const int k = size(rng);
            RealVector u(k), sigma(k), alpha(k);
            for (int i = 0; i < k; ++i)
            {
                u[i] = std::pow(10.0, logu(rng));
                sigma[i] = std::pow(10.0, logu(rng));
                alpha[i] = unit(rng);
            }
            const double p = std::pow(10.0, logu(rng) + 1);
            const WaterFillingResult r = water_filling(u, sigma, alpha, p);
            const Exhaustive ex = exhaustive_water_filling(u.cwiseProduct(sigma), alpha, p);
            unsigned mask = 0;
            for (int i = 0; i < k; ++i)
                if (r.powers[i] > 0.0)
                    mask |= 1u << i;
            const double err = (r.powers - ex.powers).cwiseAbs().maxCoeff();
            worst = std::max(worst, err);
            mismatched += mask != ex.mask || err > 1e-10;
        }
        return {mismatched == 0, fmt("1000 instances, K <= 8: %d active-set or power mismatches, worst power "
                                     "difference %.2e (limit 1e-10)",
                                     mismatched, worst)};
    }
}

int main(int argc, char **argv)
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"WSR at P_T = 100 mA^2", criterion_1},
        {"WSR at P_T = 1000 mA^2", criterion_2},
        {"Fourier truncation sizes", criterion_3},
        {"monotone convergence", criterion_4},
        {"power equality", criterion_5},
        {"ZF orthogonality", criterion_6},
        {"oracle equivalence", criterion_7},
        {"per-realization solver ordering", criterion_8},
        {"ZF gap shrinks with power", criterion_9},
        {"complexity trend", criterion_10},
        {"quadrature convergence", criterion_11},
        {"optimality structure residual", criterion_12},
        {"water-filling against exhaustive search", criterion_13},
    };
    // timing first, before the other criteria warm the allocator and caches unevenly
    std::vector<Outcome> outcomes(criteria.size());
    std::vector<double> elapsed(criteria.size());
    std::vector<std::size_t> order{9};
    for (std::size_t i = 0; i < criteria.size(); ++i)
        if (i != 9)
            order.push_back(i);
    std::vector<bool> selected(criteria.size(), argc < 2);
    for (int a = 1; a < argc; ++a)
    {
        const int n = std::atoi(argv[a]);
        if (n < 1 || n > static_cast<int>(criteria.size()))
        {
            std::fprintf(stderr, "no criterion %s\n", argv[a]);
            return 64;
        }
        selected[static_cast<std::size_t>(n - 1)] = true;
    }
    for (std::size_t i : order)
    {
        if (!selected[i])
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        try
        {
            outcomes[i] = criteria[i].second();
        }
        catch (const std::exception &e)
        {
            outcomes[i] = {false, std::string("exception: ") + e.what()};
        }
        elapsed[i] = seconds_since(t0);
    }
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i)
    {
        if (!selected[i])
            continue;
        std::printf("%s %2zu %s: %s [%.1f s]\n", outcomes[i].pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    outcomes[i].detail.c_str(), elapsed[i]);
        failures += !outcomes[i].pass;
    }
    std::fflush(stdout);
    return failures;
}
