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

#include "experiments.hpp"
#include "format.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace capa_bench
{
    namespace
    {
        using nlohmann::json;
        namespace fs = std::filesystem;

        capa_scenario_params params_for(const ScenarioTemplate &t, SweepAxis axis, double value)
        {
            capa_scenario_params p{t.lx, t.ly, t.frequency, t.impedance, t.power_mA2, t.light_speed};
            switch (axis)
            {
            case SweepAxis::power:
                p.power_mA2 = value;
                break;
            case SweepAxis::aperture:
                p.lx = p.ly = std::sqrt(value);
                break;
            case SweepAxis::frequency:
                p.frequency = value;
                break;
            default:
                break;
            }
            return p;
        }

        ScenarioPtr make_scenario(const ScenarioTemplate &t, SweepAxis axis, double value,
                                  const std::vector<Position> &positions)
        {
            const capa_scenario_params p = params_for(t, axis, value);
            capa_scenario *raw = nullptr;
            check(capa_scenario_create(&p, &raw), "capa_scenario_create");
            ScenarioPtr s(raw);
            const double k = static_cast<double>(positions.size());
            for (const auto &pos : positions)
            {
                const capa_user u{{pos[0], pos[1], pos[2]},
                                  {t.polarization[0], t.polarization[1], t.polarization[2]},
                                  t.noise_power,
                                  t.weight ? *t.weight : 1.0 / k,
                                  t.absorption};
                check(capa_scenario_add_user(s.get(), &u), "capa_scenario_add_user");
            }
            return s;
        }

        json config_json(const ExperimentConfig &config)
        {
            json out = json::object();
            for (const auto &[key, value] : config_entries(config))
            {
                const auto dot = key.find('.');
                out[key.substr(0, dot)][key.substr(dot + 1)] = value;
            }
            return out;
        }

        json provenance(const ExperimentConfig &config, const char *kind)
        {
            return json{{"kind", kind},
                        {"version", capa_version()},
                        {"build_id", capa_build_id()},
                        {"config", config_json(config)}};
        }

        std::string out_path(const ExperimentConfig &config, const std::string &suffix)
        {
            fs::create_directories(config.output.dir);
            return (fs::path(config.output.dir) / (config.output.prefix + suffix)).string();
        }

        std::ofstream open_out(const std::string &path)
        {
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            if (!out)
                throw std::runtime_error("cannot write " + path);
            return out;
        }

        void write_json(const std::string &path, const json &doc)
        {
            auto out = open_out(path);
            out << doc.dump(2) << '\n';
        }

        // json stores doubles as shortest round-trip too; non-finite values become null.
        json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

        double elapsed(std::chrono::steady_clock::time_point t0)
        {
            return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
    }

    void check(capa_status status, const char *what)
    {
        if (status != CAPA_OK)
            throw std::runtime_error(std::string(what) + ": " + capa_status_name(status) + ": " + capa_last_error());
    }

    ScenarioPtr random_scenario(const ScenarioTemplate &tmpl, SweepAxis axis, double value, std::uint64_t seed)
    {
        const int k = axis == SweepAxis::users ? static_cast<int>(value) : tmpl.num_users;
        // Placeholders only need to be distinct; sampling replaces them.
        std::vector<Position> placeholders;
        for (int i = 0; i < k; ++i)
            placeholders.push_back({0.0, 0.0, tmpl.region.z_min + i});
        ScenarioPtr s = make_scenario(tmpl, axis, value, placeholders);
        check(capa_scenario_sample_positions(s.get(), &tmpl.region, seed), "capa_scenario_sample_positions");
        return s;
    }

    ScenarioPtr fixed_scenario(const ScenarioTemplate &tmpl, const std::vector<Position> &positions)
    {
        return make_scenario(tmpl, SweepAxis::none, 0.0, positions);
    }

    SolutionPtr solve(const capa_scenario *scenario, capa_solver solver, const capa_solver_options &options)
    {
        capa_solution *raw = nullptr;
        check(capa_solve(scenario, solver, &options, &raw), capa_solver_name(solver));
        return SolutionPtr(raw);
    }

    SweepResult run_sweep(const ExperimentConfig &config)
    {
        config.validate();
        const auto &values = config.sweep.values;
        const auto &solvers = config.run.solvers;
        const std::size_t n_real = static_cast<std::size_t>(config.run.realizations);
        const std::size_t n_jobs = values.size() * n_real;
        const std::size_t ns = solvers.size();

        SweepResult result;
        result.records.resize(n_jobs * ns);

        auto job = [&](std::size_t index)
        {
            const double value = values[index / n_real];
            const std::uint64_t seed = config.run.base_seed + index % n_real;
            ScenarioPtr scenario;
            std::string setup_error;
            try
            {
                scenario = random_scenario(config.scenario, config.sweep.axis, value, seed);
            }
            catch (const std::exception &e)
            {
                setup_error = e.what();
            }
            for (std::size_t s = 0; s < ns; ++s)
            {
                RealizationRecord &rec = result.records[index * ns + s];
                rec.value = value;
                rec.seed = seed;
                rec.solver = solvers[s];
                if (!scenario)
                {
                    rec.error = setup_error;
                    continue;
                }
                try
                {
                    const SolutionPtr sol = solve(scenario.get(), solvers[s], config.options_for(solvers[s]));
                    capa_solution_summary sum;
                    check(capa_solution_get_summary(sol.get(), &sum), "capa_solution_get_summary");
                    rec.ok = true;
                    rec.wsr = sum.wsr;
                    rec.wall_time = sum.wall_time;
                    rec.iterations = sum.iterations;
                    rec.converged = sum.converged != 0;
                }
                catch (const std::exception &e)
                {
                    rec.error = e.what();
                }
            }
        };

        std::atomic<std::size_t> next{0};
        auto worker = [&]
        {
            for (std::size_t i = next++; i < n_jobs; i = next++)
                job(i);
        };
        const std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(config.run.threads), n_jobs);
        if (n_threads <= 1)
            worker();
        else
        {
            std::vector<std::jthread> pool;
            for (std::size_t t = 0; t < n_threads; ++t)
                pool.emplace_back(worker);
        }

        // Aggregation walks records by index, so the outcome does not depend on scheduling.
        for (std::size_t v = 0; v < values.size(); ++v)
            for (std::size_t s = 0; s < ns; ++s)
            {
                ResultRow row;
                row.value = values[v];
                row.solver = solvers[s];
                row.seed_first = config.run.base_seed;
                row.seed_last = config.run.base_seed + n_real - 1;
                double sum = 0.0, sum_sq = 0.0, t_sum = 0.0, it_sum = 0.0;
                int ok = 0;
                for (std::size_t r = 0; r < n_real; ++r)
                {
                    const RealizationRecord &rec = result.records[(v * n_real + r) * ns + s];
                    ++row.realizations;
                    if (!rec.ok)
                    {
                        if (row.failed++ == 0)
                            row.first_error = rec.error;
                        continue;
                    }
                    ++ok;
                    sum += rec.wsr;
                    sum_sq += rec.wsr * rec.wsr;
                    t_sum += rec.wall_time;
                    it_sum += rec.iterations;
                }
                if (ok > 0)
                {
                    row.mean_wsr = sum / ok;
                    row.mean_wall_time = t_sum / ok;
                    row.mean_iterations = it_sum / ok;
                    if (ok > 1)
                    {
                        const double var = std::max(0.0, (sum_sq - ok * row.mean_wsr * row.mean_wsr) / (ok - 1));
                        row.std_error = std::sqrt(var / ok);
                    }
                }
                else
                {
                    row.mean_wsr = row.mean_wall_time = row.mean_iterations = std::nan("");
                }
                result.rows.push_back(row);
            }
        return result;
    }

    std::vector<std::string> write_sweep(const ExperimentConfig &config, const SweepResult &result)
    {
        const auto entries = config_entries(config);
        const std::string axis = axis_name(config.sweep.axis);
        std::vector<std::string> paths;

        {
            const std::string path = out_path(config, "_sweep.csv");
            auto out = open_out(path);
            write_csv_preamble(out, entries);
            write_csv_row(out, {"axis", "value", "solver", "status", "realizations", "failed", "mean_wsr",
                                "std_error", "mean_iterations", "seed_first", "seed_last", "error"});
            for (const auto &r : result.rows)
                write_csv_row(out, {axis, format_double(r.value), capa_solver_name(r.solver),
                                    r.ok() ? "ok" : "failed", std::to_string(r.realizations),
                                    std::to_string(r.failed), format_double(r.mean_wsr),
                                    format_double(r.std_error), format_double(r.mean_iterations),
                                    std::to_string(r.seed_first), std::to_string(r.seed_last), r.first_error});
            paths.push_back(path);
        }
        {
            const std::string path = out_path(config, "_sweep_realizations.csv");
            auto out = open_out(path);
            write_csv_preamble(out, entries);
            write_csv_row(out, {"axis", "value", "seed", "solver", "status", "wsr", "iterations", "converged", "error"});
            for (const auto &r : result.records)
                write_csv_row(out, {axis, format_double(r.value), std::to_string(r.seed), capa_solver_name(r.solver),
                                    r.ok ? "ok" : "failed", r.ok ? format_double(r.wsr) : "",
                                    std::to_string(r.iterations), r.converged ? "1" : "0", r.error});
            paths.push_back(path);
        }
        {
            const std::string path = out_path(config, "_sweep_timing.csv");
            auto out = open_out(path);
            write_csv_preamble(out, entries);
            write_csv_row(out, {"axis", "value", "solver", "mean_wall_time_s"});
            for (const auto &r : result.rows)
                write_csv_row(out, {axis, format_double(r.value), capa_solver_name(r.solver),
                                    format_double(r.mean_wall_time)});
            paths.push_back(path);
        }
        {
            json doc = provenance(config, "sweep");
            doc["axis"] = axis;
            json rows = json::array();
            for (const auto &r : result.rows)
                rows.push_back(json{{"value", r.value},
                                    {"solver", capa_solver_name(r.solver)},
                                    {"status", r.ok() ? "ok" : "failed"},
                                    {"realizations", r.realizations},
                                    {"failed", r.failed},
                                    {"mean_wsr", number(r.mean_wsr)},
                                    {"std_error", number(r.std_error)},
                                    {"mean_wall_time_s", number(r.mean_wall_time)},
                                    {"mean_iterations", number(r.mean_iterations)},
                                    {"seed_first", r.seed_first},
                                    {"seed_last", r.seed_last},
                                    {"error", r.first_error}});
            doc["rows"] = rows;
            const std::string path = out_path(config, "_sweep.json");
            write_json(path, doc);
            paths.push_back(path);
        }
        return paths;
    }

    std::vector<BenchRow> run_cpu_bench(const ExperimentConfig &config)
    {
        config.validate();
        std::vector<BenchRow> rows;
        for (double f : config.bench.frequencies)
            for (double area : config.bench.apertures)
                for (capa_solver solver : config.bench.solvers)
                {
                    ScenarioTemplate tmpl = config.scenario;
                    tmpl.frequency = f;
                    tmpl.lx = tmpl.ly = std::sqrt(area);
                    BenchRow row;
                    row.frequency = f;
                    row.aperture = area;
                    row.solver = solver;
                    const capa_solver_options &opt = config.options_for(solver);
                    try
                    {
                        const ScenarioPtr warm = random_scenario(tmpl, SweepAxis::none, 0.0, config.run.base_seed);
                        for (int w = 0; w < config.bench.warmups; ++w)
                            solve(warm.get(), solver, opt);
                    }
                    catch (const std::exception &e)
                    {
                        row.first_error = e.what();
                    }
                    std::vector<double> times;
                    double wsr_sum = 0.0, quad_sum = 0.0;
                    for (int i = 0; i < config.bench.solves; ++i)
                    {
                        try
                        {
                            const ScenarioPtr s = random_scenario(tmpl, SweepAxis::none, 0.0,
                                                                  config.run.base_seed + static_cast<std::uint64_t>(i));
                            const auto t0 = std::chrono::steady_clock::now();
                            const SolutionPtr sol = solve(s.get(), solver, opt);
                            const double t = elapsed(t0);
                            capa_solution_summary sum;
                            check(capa_solution_get_summary(sol.get(), &sum), "capa_solution_get_summary");
                            times.push_back(t);
                            wsr_sum += sum.wsr;
                            quad_sum += static_cast<double>(sum.quadrature_integrals_after_setup);
                            row.dimension = sum.dimension;
                        }
                        catch (const std::exception &e)
                        {
                            if (row.failed++ == 0 && row.first_error.empty())
                                row.first_error = e.what();
                        }
                    }
                    row.solves = static_cast<int>(times.size());
                    if (!times.empty())
                    {
                        const double n = static_cast<double>(times.size());
                        double sum = 0.0, sq = 0.0;
                        row.min_time = times.front();
                        for (double t : times)
                        {
                            sum += t;
                            sq += t * t;
                            row.min_time = std::min(row.min_time, t);
                        }
                        row.mean_time = sum / n;
                        row.std_time = n > 1 ? std::sqrt(std::max(0.0, (sq - n * row.mean_time * row.mean_time) / (n - 1))) : 0.0;
                        row.mean_wsr = wsr_sum / n;
                        row.mean_quadrature_after_setup = quad_sum / n;
                    }
                    else
                        row.mean_time = row.std_time = row.min_time = row.mean_wsr = std::nan("");
                    rows.push_back(row);
                }
        return rows;
    }

    std::vector<std::string> write_bench(const ExperimentConfig &config, const std::vector<BenchRow> &rows)
    {
        std::vector<std::string> paths;
        {
            const std::string path = out_path(config, "_bench.csv");
            auto out = open_out(path);
            write_csv_preamble(out, config_entries(config));
            write_csv_row(out, {"frequency", "aperture", "solver", "dimension", "solves", "failed", "mean_time_s",
                                "std_time_s", "min_time_s", "mean_wsr", "mean_quadrature_after_setup", "error"});
            for (const auto &r : rows)
                write_csv_row(out, {format_double(r.frequency), format_double(r.aperture), capa_solver_name(r.solver),
                                    std::to_string(r.dimension), std::to_string(r.solves), std::to_string(r.failed),
                                    format_double(r.mean_time), format_double(r.std_time), format_double(r.min_time),
                                    format_double(r.mean_wsr), format_double(r.mean_quadrature_after_setup),
                                    r.first_error});
            paths.push_back(path);
        }
        {
            json doc = provenance(config, "bench");
            json arr = json::array();
            for (const auto &r : rows)
                arr.push_back(json{{"frequency", r.frequency},
                                   {"aperture", r.aperture},
                                   {"solver", capa_solver_name(r.solver)},
                                   {"dimension", r.dimension},
                                   {"solves", r.solves},
                                   {"failed", r.failed},
                                   {"mean_time_s", number(r.mean_time)},
                                   {"std_time_s", number(r.std_time)},
                                   {"min_time_s", number(r.min_time)},
                                   {"mean_wsr", number(r.mean_wsr)},
                                   {"mean_quadrature_after_setup", number(r.mean_quadrature_after_setup)},
                                   {"error", r.first_error}});
            doc["rows"] = arr;
            const std::string path = out_path(config, "_bench.json");
            write_json(path, doc);
            paths.push_back(path);
        }
        return paths;
    }

    PatternExport export_pattern(const ExperimentConfig &config)
    {
        config.validate();
        const ScenarioPtr s = fixed_scenario(config.scenario, config.pattern.users);
        const SolutionPtr sol = solve(s.get(), config.pattern.solver, config.options_for(config.pattern.solver));
        capa_solution_summary sum;
        check(capa_solution_get_summary(sol.get(), &sum), "capa_solution_get_summary");

        PatternExport out;
        out.wsr = sum.wsr;
        const int n = config.pattern.grid;
        const double lx = config.scenario.lx, ly = config.scenario.ly;
        for (std::size_t k = 0; k < config.pattern.users.size(); ++k)
        {
            PatternGrid g;
            g.user = k;
            g.n = n;
            for (int iy = 0; iy < n; ++iy)
                for (int ix = 0; ix < n; ++ix)
                {
                    const double x = -0.5 * lx + lx * ix / (n - 1);
                    const double y = -0.5 * ly + ly * iy / (n - 1);
                    double re = 0.0, im = 0.0;
                    check(capa_solution_eval_pattern(sol.get(), k, x, y, &re, &im), "capa_solution_eval_pattern");
                    g.sx.push_back(x);
                    g.sy.push_back(y);
                    g.amplitude.push_back(std::hypot(re, im));
                    g.phase.push_back(std::atan2(im, re));
                }
            out.grids.push_back(std::move(g));
        }
        return out;
    }

    std::vector<std::string> write_pattern(const ExperimentConfig &config, const PatternExport &result)
    {
        std::vector<std::string> paths;
        const auto entries = config_entries(config);
        for (const auto &g : result.grids)
        {
            const std::string path = out_path(config, "_pattern_user" + std::to_string(g.user + 1) + ".csv");
            auto out = open_out(path);
            write_csv_preamble(out, entries);
            write_csv_row(out, {"s_x", "s_y", "amplitude", "phase"});
            for (std::size_t i = 0; i < g.sx.size(); ++i)
                write_csv_row(out, {format_double(g.sx[i]), format_double(g.sy[i]), format_double(g.amplitude[i]),
                                    format_double(g.phase[i])});
            paths.push_back(path);
        }
        json doc = provenance(config, "pattern");
        doc["solver"] = capa_solver_name(config.pattern.solver);
        doc["wsr"] = number(result.wsr);
        doc["files"] = paths;
        const std::string path = out_path(config, "_pattern.json");
        write_json(path, doc);
        paths.push_back(path);
        return paths;
    }

    QuadcheckResult run_quadcheck(const ExperimentConfig &config)
    {
        config.validate();
        const auto &qc = config.quadcheck;
        ScenarioTemplate tmpl = config.scenario;
        tmpl.frequency = qc.frequency;
        tmpl.lx = tmpl.ly = qc.side;
        std::vector<Position> users{qc.reference};
        users.insert(users.end(), qc.companions.begin(), qc.companions.end());
        const ScenarioPtr s = fixed_scenario(tmpl, users);
        const std::size_t k = users.size();

        auto corr = [&](int order)
        {
            std::vector<double> q(2 * k * k);
            check(capa_correlation(s.get(), order, q.data(), q.size()), "capa_correlation");
            return q;
        };
        const std::vector<double> ref = corr(qc.reference_order);

        QuadcheckResult out;
        const std::vector<int> orders = qc.resolved_orders();
        std::vector<std::vector<double>> errors; // [pair][order]
        for (int m : orders)
        {
            const std::vector<double> q = corr(m);
            std::size_t pair = 0;
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = i; j < k; ++j, ++pair)
                {
                    const std::size_t at = 2 * (i * k + j);
                    const double err = std::hypot(q[at] - ref[at], q[at + 1] - ref[at + 1]) /
                                       std::hypot(ref[at], ref[at + 1]);
                    out.rows.push_back({m, i, j, err});
                    if (errors.size() <= pair)
                        errors.resize(pair + 1);
                    errors[pair].push_back(err);
                }
        }
        std::size_t pair = 0;
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i; j < k; ++j, ++pair)
            {
                QuadPairTrend t{i, j, 0.0, -1};
                const auto &e = errors[pair];
                for (std::size_t a = e.size(); a-- > 0;)
                {
                    t.max_error = std::max(t.max_error, e[a]);
                    if (t.max_error < settle_tolerance)
                        t.settled_order = orders[a];
                }
                out.trends.push_back(t);
            }
        return out;
    }

    std::vector<std::string> write_quadcheck(const ExperimentConfig &config, const QuadcheckResult &result)
    {
        std::vector<std::string> paths;
        {
            const std::string path = out_path(config, "_quadcheck.csv");
            auto out = open_out(path);
            write_csv_preamble(out, config_entries(config));
            write_csv_row(out, {"order", "user_i", "user_j", "rel_error"});
            for (const auto &r : result.rows)
                write_csv_row(out, {std::to_string(r.order), std::to_string(r.i), std::to_string(r.j),
                                    format_double(r.rel_error)});
            paths.push_back(path);
        }
        {
            json doc = provenance(config, "quadcheck");
            json arr = json::array();
            for (const auto &t : result.trends)
                arr.push_back(json{{"user_i", t.i}, {"user_j", t.j}, {"max_error", t.max_error},
                                   {"settled_order", t.settled_order}});
            doc["pairs"] = arr;
            const std::string path = out_path(config, "_quadcheck.json");
            write_json(path, doc);
            paths.push_back(path);
        }
        return paths;
    }
}
