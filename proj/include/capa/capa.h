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

/* C interface to the capabf solvers. All handles are opaque; every call that can fail returns a capa_status
   and leaves a message for capa_last_error() on the calling thread. */

#ifndef CAPA_CAPA_H
#define CAPA_CAPA_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(CAPA_BUILDING_LIBRARY)
#define CAPA_API __declspec(dllexport)
#else
#define CAPA_API __declspec(dllimport)
#endif
#else
#define CAPA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C"
{
#endif

    typedef enum capa_status
    {
        CAPA_OK = 0,
        CAPA_ERR_INVALID_ARGUMENT = 1,
        CAPA_ERR_DOMAIN = 2,
        CAPA_ERR_SINGULAR = 3,
        CAPA_ERR_NOT_POSITIVE_DEFINITE = 4,
        CAPA_ERR_ILL_CONDITIONED = 5,
        CAPA_ERR_DEGENERATE = 6,
        CAPA_ERR_INTERNAL = 7,
        CAPA_ERR_NULL_POINTER = 8,
        CAPA_ERR_OUT_OF_MEMORY = 9
    } capa_status;

    typedef enum capa_solver
    {
        CAPA_SOLVER_COV = 0,        /* block-coordinate ascent on the channel correlations */
        CAPA_SOLVER_CORR_ZF = 1,    /* correlation-based zero forcing + water-filling */
        CAPA_SOLVER_FOURIER = 2,    /* truncated Fourier basis, fractional programming */
        CAPA_SOLVER_FOURIER_ZF = 3, /* truncated Fourier basis, pseudoinverse zero forcing */
        CAPA_SOLVER_MIMO = 4,       /* half-wavelength discrete array, fractional programming */
        CAPA_SOLVER_MIMO_ZF = 5     /* half-wavelength discrete array, zero forcing */
    } capa_solver;

    typedef struct capa_scenario capa_scenario;
    typedef struct capa_solution capa_solution;

    typedef struct capa_scenario_params
    {
        double lx;              /* aperture side along x, m */
        double ly;              /* aperture side along y, m */
        double frequency;       /* Hz */
        double impedance;       /* ohm */
        double power_mA2;       /* transmit budget, mA^2 */
        double light_speed;     /* m/s */
    } capa_scenario_params;

    typedef struct capa_user
    {
        double position[3];
        double polarization[3]; /* unit vector */
        double noise_power;     /* V^2/m^2 */
        double weight;
        double absorption;
    } capa_user;

    typedef struct capa_region
    {
        double ux, uy;       /* positions drawn from [-ux, ux] x [-uy, uy] */
        double z_min, z_max; /* and [z_min, z_max] */
    } capa_region;

    typedef struct capa_solver_options
    {
        int quadrature_order;       /* Gauss-Legendre nodes per axis, >= 5 */
        double rel_tol;             /* stop on relative objective change below this */
        int max_iters;              /* per start */
        int matched_filter_start;   /* bool */
        int zero_forcing_start;     /* bool */
        int regularized_starts;     /* bool: seven regularised-ZF starts */
        int random_starts;          /* count */
        uint64_t start_seed;
        int refine_served_set;      /* bool */
        int accelerate;             /* bool */
        int fourier_order_scale;    /* multiplies the truncation orders, >= 1 */
    } capa_solver_options;

    typedef struct capa_solution_summary
    {
        capa_solver solver;
        size_t num_users;
        size_t dimension;             /* K, N_F or N_d */
        double wsr;                   /* bit/s/Hz; continuous evaluation where one exists */
        double discrete_wsr;          /* objective of the finite problem (Fourier, MIMO), else = wsr */
        double total_power;           /* A^2 */
        int iterations;               /* winning start */
        int total_iterations;         /* all starts */
        int starts_tried;
        int converged;                /* bool */
        double wall_time;             /* s, whole solve including channel/correlation set-up */
        uint64_t quadrature_integrals_after_setup;
        uint64_t quadrature_points_after_setup;
    } capa_solution_summary;

    CAPA_API const char *capa_version(void);
    CAPA_API const char *capa_build_id(void);
    CAPA_API const char *capa_status_name(capa_status status);
    /* Message of the last failing call on this thread; empty when none. */
    CAPA_API const char *capa_last_error(void);

    CAPA_API void capa_scenario_params_default(capa_scenario_params *params);
    CAPA_API void capa_user_default(capa_user *user);
    CAPA_API void capa_region_default(capa_region *region);
    CAPA_API void capa_solver_options_default(capa_solver_options *options);

    CAPA_API capa_status capa_scenario_create(const capa_scenario_params *params, capa_scenario **out);
    CAPA_API void capa_scenario_destroy(capa_scenario *scenario);
    CAPA_API capa_status capa_scenario_get_params(const capa_scenario *scenario, capa_scenario_params *params);
    CAPA_API capa_status capa_scenario_set_params(capa_scenario *scenario, const capa_scenario_params *params);
    CAPA_API capa_status capa_scenario_add_user(capa_scenario *scenario, const capa_user *user);
    CAPA_API capa_status capa_scenario_clear_users(capa_scenario *scenario);
    CAPA_API capa_status capa_scenario_user_count(const capa_scenario *scenario, size_t *count);
    CAPA_API capa_status capa_scenario_get_user(const capa_scenario *scenario, size_t index, capa_user *user);
    /* Redraws the positions of all users; deterministic per seed. */
    CAPA_API capa_status capa_scenario_sample_positions(capa_scenario *scenario, const capa_region *region,
                                                        uint64_t seed);

    /* K x K correlation matrix with an order x order Gauss-Legendre rule (order >= 1), row-major,
       interleaved (re, im); q must hold 2 K^2 doubles. */
    CAPA_API capa_status capa_correlation(const capa_scenario *scenario, int order, double *q, size_t capacity);

    /* Number of Fourier modes used by the truncation rule for this aperture and frequency. */
    CAPA_API capa_status capa_fourier_mode_count(const capa_scenario *scenario, size_t *count);

    CAPA_API const char *capa_solver_name(capa_solver solver);
    CAPA_API capa_status capa_solver_from_name(const char *name, capa_solver *solver);

    /* options may be NULL for the defaults. */
    CAPA_API capa_status capa_solve(const capa_scenario *scenario, capa_solver solver,
                                    const capa_solver_options *options, capa_solution **out);
    CAPA_API void capa_solution_destroy(capa_solution *solution);
    CAPA_API capa_status capa_solution_get_summary(const capa_solution *solution, capa_solution_summary *summary);
    /* Unweighted per-user rates log2(1 + SINR); capacity >= K. */
    CAPA_API capa_status capa_solution_rates(const capa_solution *solution, double *rates, size_t capacity);
    /* Objective after the start and after every iteration of the winning start. */
    CAPA_API capa_status capa_solution_trace(const capa_solution *solution, double *values, size_t capacity,
                                             size_t *length);
    /* Source current J_k at aperture point (x, y); fails for the discrete-array solvers. */
    CAPA_API capa_status capa_solution_eval_pattern(const capa_solution *solution, size_t user, double x, double y,
                                                    double *re, double *im);

#ifdef __cplusplus
}
#endif

#endif
