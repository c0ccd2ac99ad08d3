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

#ifndef CAPA_BENCH_EXPERIMENTS_HPP
#define CAPA_BENCH_EXPERIMENTS_HPP

#include "config.hpp"

#include <memory>
#include <string>
#include <vector>

namespace capa_bench
{
    struct ScenarioDeleter
    {
        void operator()(capa_scenario *s) const { capa_scenario_destroy(s); }
    };
    struct SolutionDeleter
    {
        void operator()(capa_solution *s) const { capa_solution_destroy(s); }
    };
    using ScenarioPtr = std::unique_ptr<capa_scenario, ScenarioDeleter>;
    using SolutionPtr = std::unique_ptr<capa_solution, SolutionDeleter>;

    // Throws std::runtime_error carrying capa_last_error() when status is not CAPA_OK.
    void check(capa_status status, const char *what);

    // Template scenario with the sweep axis set to value (ignored for SweepAxis::none) and users drawn
    // from the region with the given seed.
    ScenarioPtr random_scenario(const ScenarioTemplate &tmpl, SweepAxis axis, double value, std::uint64_t seed);
    // Template scenario with users at fixed positions.
    ScenarioPtr fixed_scenario(const ScenarioTemplate &tmpl, const std::vector<Position> &positions);

    SolutionPtr solve(const capa_scenario *scenario, capa_solver solver, const capa_solver_options &options);

    struct RealizationRecord
    {
        double value = 0.0;
        std::uint64_t seed = 0;
        capa_solver solver = CAPA_SOLVER_COV;
        bool ok = false;
        std::string error;
        double wsr = 0.0;
        double wall_time = 0.0;
        int iterations = 0;
        bool converged = false;
    };

    struct ResultRow
    {
        double value = 0.0;
        capa_solver solver = CAPA_SOLVER_COV;
        int realizations = 0;
        int failed = 0;
        double mean_wsr = 0.0;
        double std_error = 0.0;
        double mean_wall_time = 0.0;
        double mean_iterations = 0.0;
        std::uint64_t seed_first = 0;
        std::uint64_t seed_last = 0;
        std::string first_error;

        bool ok() const { return failed == 0; }
    };

    struct SweepResult
    {
        std::vector<ResultRow> rows;               // value-major, solvers in config order
        std::vector<RealizationRecord> records;    // value, seed, solver order
    };

    // Seeds are base_seed + index, shared by every solver and sweep value.
    SweepResult run_sweep(const ExperimentConfig &config);
    // Writes <prefix>_sweep.csv, <prefix>_sweep_realizations.csv, <prefix>_sweep_timing.csv and
    // <prefix>_sweep.json into output.dir. Returns the written paths.
    std::vector<std::string> write_sweep(const ExperimentConfig &config, const SweepResult &result);

    struct BenchRow
    {
        double frequency = 0.0;
        double aperture = 0.0;
        capa_solver solver = CAPA_SOLVER_COV;
        std::size_t dimension = 0;
        int solves = 0;
        int failed = 0;
        double mean_time = 0.0;
        double std_time = 0.0;
        double min_time = 0.0;
        double mean_wsr = 0.0;
        double mean_quadrature_after_setup = 0.0;
        std::string first_error;
    };

    // Runs every solve on the calling thread, warm-ups first.
    std::vector<BenchRow> run_cpu_bench(const ExperimentConfig &config);
    std::vector<std::string> write_bench(const ExperimentConfig &config, const std::vector<BenchRow> &rows);

    struct PatternGrid
    {
        std::size_t user = 0;
        int n = 0;
        std::vector<double> sx; // n*n entries, s_y major
        std::vector<double> sy;
        std::vector<double> amplitude;
        std::vector<double> phase;
    };

    struct PatternExport
    {
        std::vector<PatternGrid> grids;
        double wsr = 0.0;
    };

    PatternExport export_pattern(const ExperimentConfig &config);
    std::vector<std::string> write_pattern(const ExperimentConfig &config, const PatternExport &result);

    struct QuadRow
    {
        int order = 0;
        std::size_t i = 0;
        std::size_t j = 0;
        double rel_error = 0.0;
    };

    struct QuadPairTrend
    {
        std::size_t i = 0;
        std::size_t j = 0;
        double max_error = 0.0;
        // Smallest listed order from which every larger listed order stays below settle_tolerance; -1 if none.
        int settled_order = -1;
    };

    inline constexpr double settle_tolerance = 1e-10;

    struct QuadcheckResult
    {
        std::vector<QuadRow> rows; // order-major, pairs i <= j
        std::vector<QuadPairTrend> trends;
    };

    QuadcheckResult run_quadcheck(const ExperimentConfig &config);
    std::vector<std::string> write_quadcheck(const ExperimentConfig &config, const QuadcheckResult &result);
}

#endif
