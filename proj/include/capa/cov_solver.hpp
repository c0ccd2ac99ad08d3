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

#ifndef CAPA_COV_SOLVER_HPP
#define CAPA_COV_SOLVER_HPP

#include "capa/correlation.hpp"
#include "capa/pattern.hpp"
#include "capa/starts.hpp"

#include <vector>

namespace capa
{
    // Pattern k is J_k = sum_j coefficients(j, k) conj(H_j). Overlaps follow the correlation layout:
    // w(i, k) = integral of H_i J_k, i.e. row = receiving user, column = pattern, so w = Q * coefficients.
    struct CovState
    {
        RealVector mu;
        ComplexVector lambda;
        ComplexVector a_diag; // A-bar of the step that produced w
        RealVector b_diag;    // B-bar of the step that produced w
        ComplexMatrix w;
        double rho = 0.0; // total pattern power c^H Q c summed over users
        double objective = 0.0;
        ComplexMatrix coefficients;
    };

    struct CovConfig
    {
        double rel_tol = 1e-9;
        int max_iters = 200;
        StartPlan starts; // every start is iterated to convergence; the best objective wins
        bool refine_served_set = true; // then try dropping / re-adding single users from the winner
        bool extrapolate = true; // Anderson-mixed proposals, taken only when they beat the plain step

        void validate() const;
    };

    struct UserTerms
    {
        RealVector noise;
        RealVector weights;
        double power = 0.0;
    };
    UserTerms user_terms(const Scenario &scenario);

    struct MuLambda
    {
        RealVector mu;
        ComplexVector lambda;
    };

    struct AbDiagonals
    {
        ComplexVector a_bar;
        RealVector b_bar;
    };

    // Matched-filter start: coefficients = I, w = Q, rho = tr Q.
    CovState init_state(const CorrelationMatrix &corr, const Scenario &scenario);

    // Start from the water-filled ZF patterns. Powers are floored at 1e-6 P / K so that no user starts switched off.
    CovState init_state_zf(const CorrelationMatrix &corr, const Scenario &scenario);

    // A_k = alpha_k mu_k conj(lambda_k), B_k = alpha_k |lambda_k|^2, both divided by sum_k B_k sigma_k^2 / P.
    AbDiagonals update_ab(const CovState &state, const RealVector &weights, const RealVector &noise, double power);
    AbDiagonals update_ab(const RealVector &mu, const ComplexVector &lambda, const RealVector &weights,
                          const RealVector &noise, double power);

    // Solves (I + Q diag(b)) W = Q diag(a).
    ComplexMatrix update_w(const ComplexMatrix &q, const ComplexVector &a, const RealVector &b);

    // tr(C^H Q C) with C = diag(a) - diag(b) W; small negative rounding is clamped to 0.
    double power_rho(const ComplexMatrix &q, const ComplexVector &a, const RealVector &b, const ComplexMatrix &w);

    MuLambda update_mu_lambda(const ComplexMatrix &w, double rho, const RealVector &noise, double power);

    // Per-user SINR with the sigma^2 rho / P noise term; scale invariant in the coefficients.
    RealVector sinr_from_overlaps(const ComplexMatrix &w, double rho, const RealVector &noise, double power);

    // sum_k alpha_k log2(1 + sinr_k).
    double weighted_rate(const RealVector &sinr, const RealVector &weights);

    struct CovResult
    {
        CovState state;
        std::vector<double> trace; // objective after init and after every iteration
        int iterations = 0;
        int total_iterations = 0; // summed over all starts
        bool converged = false;
        StartKind start = StartKind::matched_filter;
        std::size_t starts_tried = 0;
        int extrapolated_steps = 0;
    };

    // Works on Q only: no quadrature after corr was built.
    CovResult run_bcd(const CorrelationMatrix &corr, const Scenario &scenario, const CovConfig &config = {});

    // Start from arbitrary pattern coefficients (column k = pattern k).
    CovState state_from_coefficients(const CorrelationMatrix &corr, const Scenario &scenario,
                                     const ComplexMatrix &coefficients);
    // Single run from the given state; config.starts is ignored.
    CovResult run_bcd_from(CovState start, const CorrelationMatrix &corr, const Scenario &scenario,
                           const CovConfig &config = {});

    // One plain block-coordinate step from state (mu, lambda fixed -> A, B -> W -> rho -> mu, lambda).
    CovState bcd_step(const CovState &state, const ComplexMatrix &q, const UserTerms &terms);

    // Patterns scaled to the budget: total power equals P.
    std::vector<BeamPattern> synthesize_patterns(const CovState &state, const CorrelationMatrix &corr, double power);

    struct RateReport
    {
        RealVector sinr;
        RealVector rates; // unweighted log2(1 + sinr)
        double wsr = 0.0;
    };

    // Overlaps through Q for conjugate-channel patterns, quadrature otherwise.
    RateReport wsr_eval(const std::vector<BeamPattern> &patterns, const CorrelationMatrix &corr, const RealVector &noise,
                        const RealVector &weights);

    // Same, from an overlap matrix w(i, k) = integral of H_i J_k.
    RateReport rates_from_overlaps(const ComplexMatrix &w, const RealVector &noise, const RealVector &weights);
}

#endif
