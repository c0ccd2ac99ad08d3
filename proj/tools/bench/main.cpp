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

#include "config.hpp"
#include "experiments.hpp"
#include "format.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace
{
    using namespace capa_bench;

    struct CommonFlags
    {
        std::string config;
        std::optional<std::uint64_t> seed;
        std::optional<std::string> out;
        std::optional<std::string> solvers;
        std::optional<int> realizations;
        std::optional<int> threads;
    };

    void add_common(CLI::App *cmd, CommonFlags &f)
    {
        cmd->add_option("--config", f.config, "INI or JSON experiment config")->check(CLI::ExistingFile);
        cmd->add_option("--seed", f.seed, "base seed");
        cmd->add_option("--out", f.out, "output directory");
        cmd->add_option("--solvers", f.solvers, "comma-separated solvers");
        cmd->add_option("--realizations", f.realizations, "realizations per sweep value");
        cmd->add_option("--threads", f.threads, "worker threads for sweeps");
    }

    ExperimentConfig resolve(const CommonFlags &f, bool bench_solvers)
    {
        ExperimentConfig c = f.config.empty() ? default_config() : load_config(f.config);
        if (f.seed)
            c.run.base_seed = *f.seed;
        if (f.out)
            c.output.dir = *f.out;
        if (f.solvers)
        {
            const auto list = parse_solver_list(*f.solvers, "--solvers");
            (bench_solvers ? c.bench.solvers : c.run.solvers) = list;
        }
        if (f.realizations)
            c.run.realizations = *f.realizations;
        if (f.threads)
            c.run.threads = *f.threads;
        c.validate();
        return c;
    }

    void print_paths(const std::vector<std::string> &paths)
    {
        for (const auto &p : paths)
            std::cout << "wrote " << p << '\n';
    }

    int cmd_solve(const ExperimentConfig &c)
    {
        const ScenarioPtr s = random_scenario(c.scenario, SweepAxis::none, 0.0, c.run.base_seed);
        nlohmann::json doc{{"kind", "solve"}, {"version", capa_version()}, {"build_id", capa_build_id()},
                           {"seed", c.run.base_seed}};
        nlohmann::json cfg = nlohmann::json::object();
        for (const auto &[k, v] : config_entries(c))
            cfg[k.substr(0, k.find('.'))][k.substr(k.find('.') + 1)] = v;
        doc["config"] = cfg;
        size_t k_users = 0;
        check(capa_scenario_user_count(s.get(), &k_users), "capa_scenario_user_count");
        nlohmann::json users = nlohmann::json::array();
        for (size_t k = 0; k < k_users; ++k)
        {
            capa_user u;
            check(capa_scenario_get_user(s.get(), k, &u), "capa_scenario_get_user");
            users.push_back({u.position[0], u.position[1], u.position[2]});
        }
        doc["users"] = users;
        nlohmann::json results = nlohmann::json::array();
        int status = 0;
        std::printf("%-12s %12s %8s %10s %12s\n", "solver", "wsr", "iters", "dim", "time_s");
        for (capa_solver solver : c.run.solvers)
        {
            try
            {
                const SolutionPtr sol = solve(s.get(), solver, c.options_for(solver));
                capa_solution_summary sum;
                check(capa_solution_get_summary(sol.get(), &sum), "capa_solution_get_summary");
                std::vector<double> rates(sum.num_users);
                check(capa_solution_rates(sol.get(), rates.data(), rates.size()), "capa_solution_rates");
                std::printf("%-12s %12.6f %8d %10zu %12.6f\n", capa_solver_name(solver), sum.wsr, sum.iterations,
                            sum.dimension, sum.wall_time);
                results.push_back({{"solver", capa_solver_name(solver)},
                                   {"wsr", sum.wsr},
                                   {"rates", rates},
                                   {"iterations", sum.iterations},
                                   {"converged", sum.converged != 0},
                                   {"dimension", sum.dimension},
                                   {"total_power", sum.total_power},
                                   {"wall_time_s", sum.wall_time}});
            }
            catch (const std::exception &e)
            {
                std::printf("%-12s failed: %s\n", capa_solver_name(solver), e.what());
                results.push_back({{"solver", capa_solver_name(solver)}, {"error", e.what()}});
                status = 1;
            }
        }
        doc["results"] = results;
        std::filesystem::create_directories(c.output.dir);
        const auto path = (std::filesystem::path(c.output.dir) / (c.output.prefix + "_solve.json")).string();
        std::ofstream(path) << doc.dump(2) << '\n';
        std::cout << "wrote " << path << '\n';
        return status;
    }

    int cmd_sweep(const ExperimentConfig &c)
    {
        const SweepResult r = run_sweep(c);
        std::printf("%-10s %14s %-12s %12s %10s %8s\n", axis_name(c.sweep.axis), "value", "solver", "mean_wsr",
                    "std_err", "failed");
        int failed = 0;
        for (const auto &row : r.rows)
        {
            std::printf("%-10s %14s %-12s %12.6f %10.6f %8d\n", "", format_double(row.value).c_str(),
                        capa_solver_name(row.solver), row.mean_wsr, row.std_error, row.failed);
            failed += row.failed;
        }
        print_paths(write_sweep(c, r));
        return failed > 0 ? 1 : 0;
    }

    int cmd_bench(const ExperimentConfig &c)
    {
        const auto rows = run_cpu_bench(c);
        std::printf("%12s %10s %-12s %8s %12s %12s\n", "frequency", "aperture", "solver", "dim", "mean_s", "std_s");
        int failed = 0;
        for (const auto &r : rows)
        {
            std::printf("%12s %10s %-12s %8zu %12.6f %12.6f\n", format_double(r.frequency).c_str(),
                        format_double(r.aperture).c_str(), capa_solver_name(r.solver), r.dimension, r.mean_time,
                        r.std_time);
            failed += r.failed;
        }
        print_paths(write_bench(c, rows));
        return failed > 0 ? 1 : 0;
    }

    int cmd_pattern(const ExperimentConfig &c)
    {
        const PatternExport p = export_pattern(c);
        std::printf("%s wsr %.6f\n", capa_solver_name(c.pattern.solver), p.wsr);
        print_paths(write_pattern(c, p));
        return 0;
    }

    int cmd_quadcheck(const ExperimentConfig &c)
    {
        const QuadcheckResult q = run_quadcheck(c);
        std::printf("%6s %6s %14s %14s\n", "user_i", "user_j", "max_rel_error", "settled_order");
        for (const auto &t : q.trends)
            std::printf("%6zu %6zu %14.3e %14d\n", t.i, t.j, t.max_error, t.settled_order);
        print_paths(write_quadcheck(c, q));
        return 0;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"capa-bench: experiments for continuous-aperture beamforming"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(capa_version()) + " (" + capa_build_id() + ")");

    CommonFlags flags;
    auto *solve = app.add_subcommand("solve", "solve one realization with every configured solver");
    auto *sweep = app.add_subcommand("sweep", "Monte-Carlo sweep over the configured axis");
    auto *bench = app.add_subcommand("bench", "single-threaded timing table");
    auto *pattern = app.add_subcommand("pattern", "export source-current amplitude and phase grids");
    auto *quad = app.add_subcommand("quadcheck", "quadrature convergence of the channel correlations");
    for (auto *cmd : {solve, sweep, bench, pattern, quad})
        add_common(cmd, flags);

    CLI11_PARSE(app, argc, argv);

    try
    {
        const ExperimentConfig c = resolve(flags, bench->parsed());
        if (solve->parsed())
            return cmd_solve(c);
        if (sweep->parsed())
            return cmd_sweep(c);
        if (bench->parsed())
            return cmd_bench(c);
        if (pattern->parsed())
            return cmd_pattern(c);
        return cmd_quadcheck(c);
    }
    catch (const ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
