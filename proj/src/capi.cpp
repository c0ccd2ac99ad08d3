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

#include "capa/capa.h"

#include "capa/cov_solver.hpp"
#include "capa/error.hpp"
#include "capa/fourier.hpp"
#include "capa/zf_solver.hpp"

#include <chrono>
#include <cstring>
#include <new>
#include <optional>
#include <string>

#ifndef CAPA_VERSION
#define CAPA_VERSION "0.0.0"
#endif
#ifndef CAPA_BUILD_ID
#define CAPA_BUILD_ID "unknown"
#endif

struct capa_scenario
{
    capa::Scenario value;
};

struct capa_solution
{
    capa_solution_summary summary{};
    std::vector<double> rates;
    std::vector<double> trace;
    std::vector<capa::BeamPattern> patterns; // empty for the discrete-array solvers
};

namespace
{
    thread_local std::string last_error;

    capa_status status_of(capa::ErrorCode code)
    {
        switch (code)
        {
        case capa::ErrorCode::invalid_argument:
            return CAPA_ERR_INVALID_ARGUMENT;
        case capa::ErrorCode::domain:
            return CAPA_ERR_DOMAIN;
        case capa::ErrorCode::singular_matrix:
            return CAPA_ERR_SINGULAR;
        case capa::ErrorCode::not_positive_definite:
            return CAPA_ERR_NOT_POSITIVE_DEFINITE;
        case capa::ErrorCode::ill_conditioned:
            return CAPA_ERR_ILL_CONDITIONED;
        case capa::ErrorCode::degenerate:
            return CAPA_ERR_DEGENERATE;
        case capa::ErrorCode::internal:
            return CAPA_ERR_INTERNAL;
        }
        return CAPA_ERR_INTERNAL;
    }

    capa_status fail(capa_status s, const std::string &msg)
    {
        last_error = msg;
        return s;
    }

    // Runs f, translating exceptions into status codes.
    template <class F>
    capa_status guarded(F &&f)
    {
        try
        {
            last_error.clear();
            f();
            return CAPA_OK;
        }
        catch (const capa::Error &e)
        {
            return fail(status_of(e.code()), e.what());
        }
        catch (const std::bad_alloc &)
        {
            return fail(CAPA_ERR_OUT_OF_MEMORY, "out of memory");
        }
        catch (const std::exception &e)
        {
            return fail(CAPA_ERR_INTERNAL, e.what());
        }
        catch (...)
        {
            return fail(CAPA_ERR_INTERNAL, "unknown exception");
        }
    }

#define CAPA_REQUIRE(ptr)                                                                                              \
    do                                                                                                                 \
    {                                                                                                                  \
        if ((ptr) == nullptr)                                                                                          \
            return fail(CAPA_ERR_NULL_POINTER, std::string(__func__) + ": " #ptr " is null");                        \
    } while (0)

    capa::User to_user(const capa_user &u)
    {
        capa::User out;
        out.position = {u.position[0], u.position[1], u.position[2]};
        out.polarization = {u.polarization[0], u.polarization[1], u.polarization[2]};
        out.noise_power = u.noise_power;
        out.weight = u.weight;
        out.absorption = u.absorption;
        return out;
    }

    void apply_params(capa::Scenario &s, const capa_scenario_params &p)
    {
        if (!(p.lx > 0.0) || !(p.ly > 0.0) || !(p.frequency > 0.0) || !(p.impedance > 0.0) ||
            !(p.power_mA2 > 0.0) || !(p.light_speed > 0.0))
            throw capa::InvalidArgument("scenario params: every field must be positive");
        s.aperture.lx = p.lx;
        s.aperture.ly = p.ly;
        s.frequency = p.frequency;
        s.impedance = p.impedance;
        s.power_budget_mA2 = p.power_mA2;
        s.light_speed = p.light_speed;
    }

    capa::StartPlan start_plan(const capa_solver_options &o)
    {
        capa::StartPlan p;
        p.matched_filter = o.matched_filter_start != 0;
        p.zero_forcing = o.zero_forcing_start != 0;
        if (!o.regularized_starts)
            p.regularized_decades.clear();
        p.random_starts = o.random_starts;
        p.seed = o.start_seed;
        return p;
    }

    capa::DiscreteConfig discrete_config(const capa_solver_options &o)
    {
        capa::DiscreteConfig c;
        c.rel_tol = o.rel_tol;
        c.max_iters = o.max_iters;
        c.starts = start_plan(o);
        c.refine_served_set = o.refine_served_set != 0;
        c.extrapolate = o.accelerate != 0;
        return c;
    }

    void fill_from_discrete(capa_solution &sol, const capa::DiscreteSolution &d)
    {
        sol.summary.discrete_wsr = d.wsr;
        sol.summary.iterations = d.iterations;
        sol.summary.total_iterations = d.total_iterations;
        sol.summary.starts_tried = static_cast<int>(d.starts_tried);
        sol.summary.converged = d.converged ? 1 : 0;
        sol.trace = d.trace;
    }

    void set_rates(capa_solution &sol, const capa::RealVector &rates)
    {
        sol.rates.assign(rates.data(), rates.data() + rates.size());
    }

    void run_solver(const capa::Scenario &sc, capa_solver solver, const capa_solver_options &o, capa_solution &sol)
    {
        using namespace capa;
        sol.summary.solver = solver;
        sol.summary.num_users = sc.num_users();
        const UserTerms t = user_terms(sc);
        switch (solver)
        {
        case CAPA_SOLVER_COV:
        case CAPA_SOLVER_CORR_ZF:
        {
            const CorrelationMatrix corr = correlation_matrix(sc, o.quadrature_order);
            const QuadratureCounters before = quadrature_counters();
            sol.summary.dimension = sc.num_users();
            if (solver == CAPA_SOLVER_COV)
            {
                CovConfig cfg;
                cfg.rel_tol = o.rel_tol;
                cfg.max_iters = o.max_iters;
                cfg.starts = start_plan(o);
                cfg.refine_served_set = o.refine_served_set != 0;
                cfg.extrapolate = o.accelerate != 0;
                const CovResult r = run_bcd(corr, sc, cfg);
                sol.patterns = synthesize_patterns(r.state, corr, t.power);
                const RateReport rep = wsr_eval(sol.patterns, corr, t.noise, t.weights);
                sol.summary.wsr = rep.wsr;
                sol.summary.iterations = r.iterations;
                sol.summary.total_iterations = r.total_iterations;
                sol.summary.starts_tried = static_cast<int>(r.starts_tried);
                sol.summary.converged = r.converged ? 1 : 0;
                sol.trace = r.trace;
                set_rates(sol, rep.rates);
            }
            else
            {
                const ZfSolution z = zf_solve(corr, sc);
                sol.patterns = z.patterns;
                sol.summary.wsr = z.wsr;
                sol.summary.converged = 1;
                sol.summary.starts_tried = 1;
                sol.trace = {z.wsr};
                set_rates(sol, z.rates);
            }
            sol.summary.discrete_wsr = sol.summary.wsr;
            double power = 0.0;
            for (const auto &p : sol.patterns)
                power += pattern_power(corr, p);
            sol.summary.total_power = power;
            const QuadratureCounters after = quadrature_counters();
            sol.summary.quadrature_integrals_after_setup = after.integrals - before.integrals;
            sol.summary.quadrature_points_after_setup = after.point_evaluations - before.point_evaluations;
            break;
        }
        case CAPA_SOLVER_FOURIER:
        case CAPA_SOLVER_FOURIER_ZF:
        {
            FourierConfig cfg;
            cfg.base_order = o.quadrature_order;
            cfg.order_scale = o.fourier_order_scale;
            cfg.solver = discrete_config(o);
            const QuadratureCounters before = quadrature_counters();
            const FourierSolution f = fourier_solve(sc, cfg, solver == CAPA_SOLVER_FOURIER_ZF);
            fill_from_discrete(sol, f.discrete);
            sol.patterns = f.patterns;
            sol.summary.dimension = f.basis.size();
            sol.summary.wsr = f.continuous.wsr;
            sol.summary.total_power = t.power;
            set_rates(sol, f.continuous.rates);
            const QuadratureCounters after = quadrature_counters();
            sol.summary.quadrature_integrals_after_setup = after.integrals - before.integrals;
            sol.summary.quadrature_points_after_setup = after.point_evaluations - before.point_evaluations;
            break;
        }
        case CAPA_SOLVER_MIMO:
        case CAPA_SOLVER_MIMO_ZF:
        {
            const DiscreteSolution d = mimo_solve(sc, discrete_config(o), solver == CAPA_SOLVER_MIMO_ZF);
            fill_from_discrete(sol, d);
            sol.summary.dimension = static_cast<std::size_t>(d.beamformers.rows());
            sol.summary.wsr = d.wsr;
            sol.summary.total_power = d.beamformers.squaredNorm();
            set_rates(sol, d.rates);
            break;
        }
        default:
            throw InvalidArgument("capa_solve: unknown solver");
        }
    }

    const char *const solver_names[] = {"cov", "corr-zf", "fourier", "fourier-zf", "mimo", "mimo-zf"};
}

extern "C"
{
    const char *capa_version(void) { return CAPA_VERSION; }
    const char *capa_build_id(void) { return CAPA_BUILD_ID; }
    const char *capa_last_error(void) { return last_error.c_str(); }

    const char *capa_status_name(capa_status status)
    {
        switch (status)
        {
        case CAPA_OK:
            return "ok";
        case CAPA_ERR_INVALID_ARGUMENT:
            return "invalid argument";
        case CAPA_ERR_DOMAIN:
            return "domain error";
        case CAPA_ERR_SINGULAR:
            return "singular matrix";
        case CAPA_ERR_NOT_POSITIVE_DEFINITE:
            return "not positive definite";
        case CAPA_ERR_ILL_CONDITIONED:
            return "ill-conditioned";
        case CAPA_ERR_DEGENERATE:
            return "degenerate state";
        case CAPA_ERR_INTERNAL:
            return "internal error";
        case CAPA_ERR_NULL_POINTER:
            return "null pointer";
        case CAPA_ERR_OUT_OF_MEMORY:
            return "out of memory";
        }
        return "unknown status";
    }

    void capa_scenario_params_default(capa_scenario_params *params)
    {
        if (params == nullptr)
            return;
        const capa::Scenario s = capa::default_scenario(1);
        params->lx = s.aperture.lx;
        params->ly = s.aperture.ly;
        params->frequency = s.frequency;
        params->impedance = s.impedance;
        params->power_mA2 = s.power_budget_mA2;
        params->light_speed = s.light_speed;
    }

    void capa_user_default(capa_user *user)
    {
        if (user == nullptr)
            return;
        const capa::User u;
        *user = capa_user{{u.position.x, u.position.y, u.position.z},
                          {u.polarization.x, u.polarization.y, u.polarization.z},
                          u.noise_power,
                          u.weight,
                          u.absorption};
    }

    void capa_region_default(capa_region *region)
    {
        if (region == nullptr)
            return;
        const capa::UserRegion r;
        *region = capa_region{r.ux, r.uy, r.z_min, r.z_max};
    }

    void capa_solver_options_default(capa_solver_options *options)
    {
        if (options == nullptr)
            return;
        const capa::CovConfig c;
        options->quadrature_order = 20;
        options->rel_tol = c.rel_tol;
        options->max_iters = c.max_iters;
        options->matched_filter_start = c.starts.matched_filter ? 1 : 0;
        options->zero_forcing_start = c.starts.zero_forcing ? 1 : 0;
        options->regularized_starts = c.starts.regularized_decades.empty() ? 0 : 1;
        options->random_starts = c.starts.random_starts;
        options->start_seed = c.starts.seed;
        options->refine_served_set = c.refine_served_set ? 1 : 0;
        options->accelerate = c.extrapolate ? 1 : 0;
        options->fourier_order_scale = 1;
    }

    capa_status capa_scenario_create(const capa_scenario_params *params, capa_scenario **out)
    {
        CAPA_REQUIRE(out);
        *out = nullptr;
        return guarded(
            [&]
            {
                auto s = std::make_unique<capa_scenario>();
                s->value = capa::default_scenario(0);
                if (params != nullptr)
                    apply_params(s->value, *params);
                *out = s.release();
            });
    }

    void capa_scenario_destroy(capa_scenario *scenario) { delete scenario; }

    capa_status capa_scenario_get_params(const capa_scenario *scenario, capa_scenario_params *params)
    {
        CAPA_REQUIRE(scenario);
        CAPA_REQUIRE(params);
        const capa::Scenario &s = scenario->value;
        *params = capa_scenario_params{s.aperture.lx, s.aperture.ly, s.frequency, s.impedance, s.power_budget_mA2,
                                       s.light_speed};
        return CAPA_OK;
    }

    capa_status capa_scenario_set_params(capa_scenario *scenario, const capa_scenario_params *params)
    {
        CAPA_REQUIRE(scenario);
        CAPA_REQUIRE(params);
        return guarded([&] { apply_params(scenario->value, *params); });
    }

    capa_status capa_scenario_add_user(capa_scenario *scenario, const capa_user *user)
    {
        CAPA_REQUIRE(scenario);
        CAPA_REQUIRE(user);
        return guarded(
            [&]
            {
                capa::Scenario trial = scenario->value;
                trial.users.push_back(to_user(*user));
                trial.validate();
                scenario->value = std::move(trial);
            });
    }

    capa_status capa_scenario_clear_users(capa_scenario *scenario)
    {
        CAPA_REQUIRE(scenario);
        scenario->value.users.clear();
        return CAPA_OK;
    }

    capa_status capa_scenario_user_count(const capa_scenario *scenario, size_t *count)
    {
        CAPA_REQUIRE(scenario);
        CAPA_REQUIRE(count);
        *count = scenario->value.num_users();
        return CAPA_OK;
    }

    capa_status capa_scenario_get_user(const capa_scenario *scenario, size_t index, capa_user *user)
    {
        CAPA_REQUIRE(scenario);
        CAPA_REQUIRE(user);
        if (index >= scenario->value.num_users())
            return fail(CAPA_ERR_INVALID_ARGUMENT, "capa_scenario_get_user: index out of range");
        const capa::User &u = scenario->value.users[index];
        *user = capa_user{{u.position.x, u.position.y, u.position.z},
                          {u.polarization.x, u.polarization.y, u.polarization.z},
                          u.noise_power,
                          u.weight,
                          u.absorption};
        return CAPA_OK;
    }

    capa_status capa_scenario_sample_positions(capa_scenario *scenario, const capa_region *region, uint64_t seed)
    {
        CAPA_REQUIRE(scenario);
        return guarded(
            [&]
            {
                capa::UserRegion r;
                if (region != nullptr)
                    r = capa::UserRegion{region->ux, region->uy, region->z_min, region->z_max};
                scenario->value = capa::sample_scenario(scenario->value, r, seed);
            });
    }

    capa_status capa_correlation(const capa_scenario *scenario, int order, double *q, size_t capacity)
    {
        CAPA_REQUIRE(scenario);
        CAPA_REQUIRE(q);
        return guarded(
            [&]
            {
                const std::size_t k = scenario->value.num_users();
                if (capacity < 2 * k * k)
                    throw capa::InvalidArgument("capa_correlation: output buffer too small");
                const capa::ComplexMatrix q_mat = capa::correlation_at_order(scenario->value, order);
                for (std::size_t i = 0; i < k; ++i)
                    for (std::size_t j = 0; j < k; ++j)
                    {
                        const auto v = q_mat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                        q[2 * (i * k + j)] = v.real();
                        q[2 * (i * k + j) + 1] = v.imag();
                    }
            });
    }

    capa_status capa_fourier_mode_count(const capa_scenario *scenario, size_t *count)
    {
        CAPA_REQUIRE(scenario);
        CAPA_REQUIRE(count);
        return guarded([&]
                       { *count = capa::truncation(scenario->value.aperture, scenario->value.wavelength()).size(); });
    }

    const char *capa_solver_name(capa_solver solver)
    {
        const auto i = static_cast<int>(solver);
        if (i < 0 || i > 5)
            return "unknown";
        return solver_names[i];
    }

    capa_status capa_solver_from_name(const char *name, capa_solver *solver)
    {
        CAPA_REQUIRE(name);
        CAPA_REQUIRE(solver);
        for (int i = 0; i <= 5; ++i)
            if (std::strcmp(name, solver_names[i]) == 0)
            {
                *solver = static_cast<capa_solver>(i);
                return CAPA_OK;
            }
        return fail(CAPA_ERR_INVALID_ARGUMENT, std::string("unknown solver name: ") + name);
    }

    capa_status capa_solve(const capa_scenario *scenario, capa_solver solver, const capa_solver_options *options,
                           capa_solution **out)
    {
        CAPA_REQUIRE(scenario);
        CAPA_REQUIRE(out);
        *out = nullptr;
        capa_solver_options o;
        capa_solver_options_default(&o);
        if (options != nullptr)
            o = *options;
        return guarded(
            [&]
            {
                scenario->value.validate();
                auto sol = std::make_unique<capa_solution>();
                const auto t0 = std::chrono::steady_clock::now();
                run_solver(scenario->value, solver, o, *sol);
                sol->summary.wall_time =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                *out = sol.release();
            });
    }

    void capa_solution_destroy(capa_solution *solution) { delete solution; }

    capa_status capa_solution_get_summary(const capa_solution *solution, capa_solution_summary *summary)
    {
        CAPA_REQUIRE(solution);
        CAPA_REQUIRE(summary);
        *summary = solution->summary;
        return CAPA_OK;
    }

    capa_status capa_solution_rates(const capa_solution *solution, double *rates, size_t capacity)
    {
        CAPA_REQUIRE(solution);
        CAPA_REQUIRE(rates);
        if (capacity < solution->rates.size())
            return fail(CAPA_ERR_INVALID_ARGUMENT, "capa_solution_rates: output buffer too small");
        std::copy(solution->rates.begin(), solution->rates.end(), rates);
        return CAPA_OK;
    }

    capa_status capa_solution_trace(const capa_solution *solution, double *values, size_t capacity, size_t *length)
    {
        CAPA_REQUIRE(solution);
        CAPA_REQUIRE(length);
        *length = solution->trace.size();
        if (values == nullptr)
            return CAPA_OK; // size query
        const std::size_t n = std::min(capacity, solution->trace.size());
        std::copy_n(solution->trace.begin(), n, values);
        return CAPA_OK;
    }

    capa_status capa_solution_eval_pattern(const capa_solution *solution, size_t user, double x, double y, double *re,
                                           double *im)
    {
        CAPA_REQUIRE(solution);
        CAPA_REQUIRE(re);
        CAPA_REQUIRE(im);
        if (solution->patterns.empty())
            return fail(CAPA_ERR_INVALID_ARGUMENT, "capa_solution_eval_pattern: discrete-array solution has no pattern");
        if (user >= solution->patterns.size())
            return fail(CAPA_ERR_INVALID_ARGUMENT, "capa_solution_eval_pattern: user index out of range");
        return guarded(
            [&]
            {
                const std::complex<double> j = solution->patterns[user]({x, y, 0.0});
                *re = j.real();
                *im = j.imag();
            });
    }
}
