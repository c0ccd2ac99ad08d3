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
#include "format.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/json_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace capa_bench
{
    namespace
    {
        namespace pt = boost::property_tree;

        std::string trim(std::string_view s)
        {
            const auto b = s.find_first_not_of(" \t\r\n");
            if (b == std::string_view::npos)
                return {};
            const auto e = s.find_last_not_of(" \t\r\n");
            return std::string(s.substr(b, e - b + 1));
        }

        std::vector<std::string> split(const std::string &s, const std::string &delims)
        {
            std::vector<std::string> out;
            std::string cur;
            for (char c : s)
            {
                if (delims.find(c) != std::string::npos)
                {
                    if (!trim(cur).empty())
                        out.push_back(trim(cur));
                    cur.clear();
                }
                else
                    cur += c;
            }
            if (!trim(cur).empty())
                out.push_back(trim(cur));
            return out;
        }

        double to_double(const std::string &text, const std::string &path)
        {
            const std::string t = trim(text);
            double v = 0.0;
            const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
            if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
                throw ConfigError(path, "expected a number, got '" + text + "'");
            return v;
        }

        long long to_integer(const std::string &text, const std::string &path)
        {
            const double v = to_double(text, path);
            if (v != std::floor(v) || std::abs(v) > 9.0e15)
                throw ConfigError(path, "expected an integer, got '" + text + "'");
            return static_cast<long long>(v);
        }

        int to_int(const std::string &text, const std::string &path)
        {
            const long long v = to_integer(text, path);
            if (v < -2147483647LL || v > 2147483647LL)
                throw ConfigError(path, "integer out of range: '" + text + "'");
            return static_cast<int>(v);
        }

        std::uint64_t to_u64(const std::string &text, const std::string &path)
        {
            const std::string t = trim(text);
            std::uint64_t v = 0;
            const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
            if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
                throw ConfigError(path, "expected an unsigned 64-bit integer, got '" + text + "'");
            return v;
        }

        bool to_bool(const std::string &text, const std::string &path)
        {
            std::string t = trim(text);
            std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
            if (t == "true" || t == "yes" || t == "on" || t == "1")
                return true;
            if (t == "false" || t == "no" || t == "off" || t == "0")
                return false;
            throw ConfigError(path, "expected a boolean, got '" + text + "'");
        }

        std::vector<double> to_doubles(const std::string &text, const std::string &path)
        {
            std::vector<double> out;
            for (const auto &item : split(text, ", \t"))
                out.push_back(to_double(item, path));
            return out;
        }

        std::vector<int> to_ints(const std::string &text, const std::string &path)
        {
            std::vector<int> out;
            for (const auto &item : split(text, ", \t"))
                out.push_back(to_int(item, path));
            return out;
        }

        Position to_position(const std::string &text, const std::string &path)
        {
            const auto v = to_doubles(text, path);
            if (v.size() != 3)
                throw ConfigError(path, "expected three coordinates, got '" + text + "'");
            return {v[0], v[1], v[2]};
        }

        std::vector<Position> to_positions(const std::string &text, const std::string &path)
        {
            std::vector<Position> out;
            for (const auto &item : split(text, ";"))
                out.push_back(to_position(item, path));
            return out;
        }

        std::string str(bool b) { return b ? "true" : "false"; }
        std::string str(double v) { return format_double(v); }
        std::string str(int v) { return std::to_string(v); }
        std::string str(std::uint64_t v) { return std::to_string(v); }
        std::string str(const std::string &v) { return v; }

        std::string str(const std::vector<double> &v)
        {
            std::string out;
            for (std::size_t i = 0; i < v.size(); ++i)
                out += (i ? ", " : "") + format_double(v[i]);
            return out;
        }

        std::string str(const std::vector<int> &v)
        {
            std::string out;
            for (std::size_t i = 0; i < v.size(); ++i)
                out += (i ? ", " : "") + std::to_string(v[i]);
            return out;
        }

        std::string str(const Position &p)
        {
            return format_double(p[0]) + " " + format_double(p[1]) + " " + format_double(p[2]);
        }

        std::string str(const std::vector<Position> &v)
        {
            std::string out;
            for (std::size_t i = 0; i < v.size(); ++i)
                out += (i ? "; " : "") + str(v[i]);
            return out;
        }

        using Setter = std::function<void(ExperimentConfig &, const std::string &, const std::string &)>;
        using Getter = std::function<std::string(const ExperimentConfig &)>;

        struct Field
        {
            std::string key;
            Setter set;
            Getter get;
        };

        using Section = std::vector<Field>;

        template <class Member>
        Field field(std::string key, Member member)
        {
            return Field{std::move(key),
                         [member](ExperimentConfig &c, const std::string &v, const std::string &path)
                         {
                             auto &slot = member(c);
                             using T = std::decay_t<decltype(slot)>;
                             if constexpr (std::is_same_v<T, double>)
                                 slot = to_double(v, path);
                             else if constexpr (std::is_same_v<T, int>)
                                 slot = to_int(v, path);
                             else if constexpr (std::is_same_v<T, std::uint64_t>)
                                 slot = to_u64(v, path);
                             else if constexpr (std::is_same_v<T, std::vector<double>>)
                                 slot = to_doubles(v, path);
                             else if constexpr (std::is_same_v<T, std::vector<int>>)
                                 slot = to_ints(v, path);
                             else if constexpr (std::is_same_v<T, Position>)
                                 slot = to_position(v, path);
                             else if constexpr (std::is_same_v<T, std::vector<Position>>)
                                 slot = to_positions(v, path);
                             else if constexpr (std::is_same_v<T, std::string>)
                                 slot = trim(v);
                             else
                                 static_assert(sizeof(T) == 0, "unsupported field type");
                         },
                         [member](const ExperimentConfig &c)
                         { return str(member(const_cast<ExperimentConfig &>(c))); }};
        }

        Field flag(std::string key, std::function<int &(ExperimentConfig &)> member)
        {
            return Field{std::move(key),
                         [member](ExperimentConfig &c, const std::string &v, const std::string &path)
                         { member(c) = to_bool(v, path) ? 1 : 0; },
                         [member](const ExperimentConfig &c)
                         { return str(member(const_cast<ExperimentConfig &>(c)) != 0); }};
        }

        Field solvers_field(std::string key, std::function<std::vector<capa_solver> &(ExperimentConfig &)> member)
        {
            return Field{std::move(key),
                         [member](ExperimentConfig &c, const std::string &v, const std::string &path)
                         { member(c) = parse_solver_list(v, path); },
                         [member](const ExperimentConfig &c)
                         { return solver_list_string(member(const_cast<ExperimentConfig &>(c))); }};
        }

        Section options_section(capa_solver_options ExperimentConfig::*which)
        {
            auto opt = [which](auto pick)
            { return [which, pick](ExperimentConfig &c) -> decltype(auto) { return pick(c.*which); }; };
            return {
                field("quadrature_order", opt([](capa_solver_options &o) -> int & { return o.quadrature_order; })),
                field("rel_tol", opt([](capa_solver_options &o) -> double & { return o.rel_tol; })),
                field("max_iters", opt([](capa_solver_options &o) -> int & { return o.max_iters; })),
                flag("matched_filter_start",
                     opt([](capa_solver_options &o) -> int & { return o.matched_filter_start; })),
                flag("zero_forcing_start", opt([](capa_solver_options &o) -> int & { return o.zero_forcing_start; })),
                flag("regularized_starts", opt([](capa_solver_options &o) -> int & { return o.regularized_starts; })),
                field("random_starts", opt([](capa_solver_options &o) -> int & { return o.random_starts; })),
                field("start_seed", opt([](capa_solver_options &o) -> std::uint64_t & { return o.start_seed; })),
                flag("refine_served_set", opt([](capa_solver_options &o) -> int & { return o.refine_served_set; })),
                flag("accelerate", opt([](capa_solver_options &o) -> int & { return o.accelerate; })),
                field("fourier_order_scale",
                      opt([](capa_solver_options &o) -> int & { return o.fourier_order_scale; })),
            };
        }

        // Sections in application order; [fourier] and [mimo] come last so they override [solver].
        const std::vector<std::pair<std::string, Section>> &schema()
        {
            using C = ExperimentConfig;
            static const std::vector<std::pair<std::string, Section>> s = {
                {"scenario",
                 {
                     field("lx", [](C &c) -> double & { return c.scenario.lx; }),
                     field("ly", [](C &c) -> double & { return c.scenario.ly; }),
                     field("frequency", [](C &c) -> double & { return c.scenario.frequency; }),
                     field("impedance", [](C &c) -> double & { return c.scenario.impedance; }),
                     field("power_mA2", [](C &c) -> double & { return c.scenario.power_mA2; }),
                     field("light_speed", [](C &c) -> double & { return c.scenario.light_speed; }),
                     field("num_users", [](C &c) -> int & { return c.scenario.num_users; }),
                     field("noise_power", [](C &c) -> double & { return c.scenario.noise_power; }),
                     Field{"weight",
                           [](C &c, const std::string &v, const std::string &path)
                           {
                               if (trim(v) == "auto")
                                   c.scenario.weight.reset();
                               else
                                   c.scenario.weight = to_double(v, path);
                           },
                           [](const C &c) { return c.scenario.weight ? str(*c.scenario.weight) : std::string("auto"); }},
                     field("absorption", [](C &c) -> double & { return c.scenario.absorption; }),
                     field("polarization", [](C &c) -> Position & { return c.scenario.polarization; }),
                 }},
                {"region",
                 {
                     field("ux", [](C &c) -> double & { return c.scenario.region.ux; }),
                     field("uy", [](C &c) -> double & { return c.scenario.region.uy; }),
                     field("z_min", [](C &c) -> double & { return c.scenario.region.z_min; }),
                     field("z_max", [](C &c) -> double & { return c.scenario.region.z_max; }),
                 }},
                {"sweep",
                 {
                     Field{"axis", [](C &c, const std::string &v, const std::string &) { c.sweep.axis = axis_from_name(trim(v)); },
                           [](const C &c) { return std::string(axis_name(c.sweep.axis)); }},
                     field("values", [](C &c) -> std::vector<double> & { return c.sweep.values; }),
                 }},
                {"run",
                 {
                     solvers_field("solvers", [](C &c) -> std::vector<capa_solver> & { return c.run.solvers; }),
                     field("realizations", [](C &c) -> int & { return c.run.realizations; }),
                     field("base_seed", [](C &c) -> std::uint64_t & { return c.run.base_seed; }),
                     field("threads", [](C &c) -> int & { return c.run.threads; }),
                 }},
                {"output",
                 {
                     field("dir", [](C &c) -> std::string & { return c.output.dir; }),
                     field("prefix", [](C &c) -> std::string & { return c.output.prefix; }),
                 }},
                {"bench",
                 {
                     field("frequencies", [](C &c) -> std::vector<double> & { return c.bench.frequencies; }),
                     field("apertures", [](C &c) -> std::vector<double> & { return c.bench.apertures; }),
                     solvers_field("solvers", [](C &c) -> std::vector<capa_solver> & { return c.bench.solvers; }),
                     field("warmups", [](C &c) -> int & { return c.bench.warmups; }),
                     field("solves", [](C &c) -> int & { return c.bench.solves; }),
                 }},
                {"pattern",
                 {
                     Field{"solver",
                           [](C &c, const std::string &v, const std::string &path)
                           {
                               const auto s = parse_solver_list(v, path);
                               if (s.size() != 1)
                                   throw ConfigError(path, "expected exactly one solver");
                               c.pattern.solver = s.front();
                           },
                           [](const C &c) { return std::string(capa_solver_name(c.pattern.solver)); }},
                     field("users", [](C &c) -> std::vector<Position> & { return c.pattern.users; }),
                     field("grid", [](C &c) -> int & { return c.pattern.grid; }),
                 }},
                {"quadcheck",
                 {
                     field("frequency", [](C &c) -> double & { return c.quadcheck.frequency; }),
                     field("side", [](C &c) -> double & { return c.quadcheck.side; }),
                     field("reference", [](C &c) -> Position & { return c.quadcheck.reference; }),
                     field("companions", [](C &c) -> std::vector<Position> & { return c.quadcheck.companions; }),
                     field("orders", [](C &c) -> std::vector<int> & { return c.quadcheck.orders; }),
                     field("reference_order", [](C &c) -> int & { return c.quadcheck.reference_order; }),
                 }},
                {"solver", options_section(&ExperimentConfig::solver)},
                {"fourier", options_section(&ExperimentConfig::fourier)},
                {"mimo", options_section(&ExperimentConfig::mimo)},
            };
            return s;
        }

        using Raw = std::map<std::string, std::map<std::string, std::string>>;

        // JSON arrays arrive as children with empty keys; flatten them back to the INI list syntax.
        std::string flatten(const pt::ptree &node)
        {
            if (node.empty())
                return node.data();
            std::string out;
            bool nested = false;
            for (const auto &[k, child] : node)
            {
                if (!k.empty())
                    throw ConfigError(k, "unexpected object inside a value");
                nested = nested || !child.empty();
            }
            bool first = true;
            for (const auto &[k, child] : node)
            {
                if (!first)
                    out += nested ? "; " : ", ";
                first = false;
                out += flatten(child);
            }
            return out;
        }

        Raw raw_from_tree(const pt::ptree &tree)
        {
            Raw raw;
            for (const auto &[section, body] : tree)
            {
                if (body.empty() && !body.data().empty())
                    throw ConfigError(section, "top-level keys must sit inside a section");
                for (const auto &[key, value] : body)
                    raw[section][key] = flatten(value);
            }
            return raw;
        }

        ExperimentConfig apply(const Raw &raw)
        {
            ExperimentConfig c = default_config();
            for (const auto &[section, _] : raw)
            {
                const auto &s = schema();
                if (std::none_of(s.begin(), s.end(), [&](const auto &p) { return p.first == section; }))
                    throw ConfigError(section, "unknown section");
            }
            // [solver] values seed the [fourier] and [mimo] blocks before their own overrides.
            bool solver_done = false;
            for (const auto &[section, fields] : schema())
            {
                if ((section == "fourier" || section == "mimo") && !solver_done)
                {
                    c.fourier = c.solver;
                    c.mimo = c.solver;
                    solver_done = true;
                }
                const auto it = raw.find(section);
                if (it == raw.end())
                    continue;
                for (const auto &[key, value] : it->second)
                {
                    const std::string path = section + "." + key;
                    const auto f = std::find_if(fields.begin(), fields.end(), [&](const Field &x) { return x.key == key; });
                    if (f == fields.end())
                        throw ConfigError(path, "unknown key");
                    f->set(c, value, path);
                }
            }
            c.validate();
            return c;
        }

        void require(bool ok, const std::string &path, const std::string &message)
        {
            if (!ok)
                throw ConfigError(path, message);
        }

        void validate_options(const capa_solver_options &o, const std::string &section)
        {
            require(o.quadrature_order >= 5 && o.quadrature_order <= 512, section + ".quadrature_order",
                    "must lie in [5, 512]");
            require(o.rel_tol > 0.0 && o.rel_tol < 1.0, section + ".rel_tol", "must lie in (0, 1)");
            require(o.max_iters >= 1, section + ".max_iters", "must be at least 1");
            require(o.random_starts >= 0, section + ".random_starts", "must be non-negative");
            require(o.matched_filter_start || o.zero_forcing_start || o.regularized_starts || o.random_starts > 0,
                    section + ".matched_filter_start", "at least one start must be enabled");
            require(o.fourier_order_scale >= 1, section + ".fourier_order_scale", "must be at least 1");
        }

        bool positive_all(const std::vector<double> &v)
        {
            return std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0 && std::isfinite(x); });
        }
    }

    const char *axis_name(SweepAxis axis)
    {
        switch (axis)
        {
        case SweepAxis::none:
            return "none";
        case SweepAxis::power:
            return "power";
        case SweepAxis::aperture:
            return "aperture";
        case SweepAxis::users:
            return "users";
        case SweepAxis::frequency:
            return "frequency";
        }
        return "none";
    }

    SweepAxis axis_from_name(const std::string &name)
    {
        for (SweepAxis a : {SweepAxis::none, SweepAxis::power, SweepAxis::aperture, SweepAxis::users,
                            SweepAxis::frequency})
            if (name == axis_name(a))
                return a;
        throw ConfigError("sweep.axis", "unknown axis '" + name + "' (none, power, aperture, users, frequency)");
    }

    std::vector<int> QuadcheckSettings::resolved_orders() const
    {
        if (!orders.empty())
            return orders;
        std::vector<int> out;
        for (int m = 2; m <= 40; m += 2)
            out.push_back(m);
        return out;
    }

    const capa_solver_options &ExperimentConfig::options_for(capa_solver s) const
    {
        switch (s)
        {
        case CAPA_SOLVER_FOURIER:
        case CAPA_SOLVER_FOURIER_ZF:
            return fourier;
        case CAPA_SOLVER_MIMO:
        case CAPA_SOLVER_MIMO_ZF:
            return mimo;
        default:
            return solver;
        }
    }

    void ExperimentConfig::validate() const
    {
        const auto &s = scenario;
        for (const auto &[v, name] : {std::pair{s.lx, "lx"}, std::pair{s.ly, "ly"}, std::pair{s.frequency, "frequency"},
                                      std::pair{s.impedance, "impedance"}, std::pair{s.power_mA2, "power_mA2"},
                                      std::pair{s.light_speed, "light_speed"}, std::pair{s.noise_power, "noise_power"},
                                      std::pair{s.absorption, "absorption"}})
            require(v > 0.0 && std::isfinite(v), std::string("scenario.") + name, "must be positive and finite");
        require(s.num_users >= 1, "scenario.num_users", "must be at least 1");
        if (s.weight)
            require(*s.weight > 0.0 && std::isfinite(*s.weight), "scenario.weight", "must be positive or 'auto'");
        const auto &p = s.polarization;
        require(std::abs(p[0] * p[0] + p[1] * p[1] + p[2] * p[2] - 1.0) < 1e-9, "scenario.polarization",
                "must be a unit vector");
        require(s.region.ux >= 0.0 && s.region.uy >= 0.0, "region.ux", "half-widths must be non-negative");
        require(s.region.z_min > 0.0, "region.z_min", "must be positive");
        require(s.region.z_max >= s.region.z_min, "region.z_max", "must not be below z_min");

        require(!sweep.values.empty(), "sweep.values", "must be non-empty");
        if (sweep.axis == SweepAxis::users)
            for (double v : sweep.values)
                require(v >= 1.0 && v == std::floor(v), "sweep.values", "user counts must be positive integers");
        else if (sweep.axis != SweepAxis::none)
            require(positive_all(sweep.values), "sweep.values", "must be positive");

        require(!run.solvers.empty(), "run.solvers", "must name at least one solver");
        require(run.realizations >= 1, "run.realizations", "must be at least 1");
        require(run.threads >= 1, "run.threads", "must be at least 1");

        require(!output.prefix.empty(), "output.prefix", "must be non-empty");
        require(!output.dir.empty(), "output.dir", "must be non-empty");

        validate_options(solver, "solver");
        validate_options(fourier, "fourier");
        validate_options(mimo, "mimo");

        require(!bench.frequencies.empty() && positive_all(bench.frequencies), "bench.frequencies",
                "must be a non-empty list of positive values");
        require(!bench.apertures.empty() && positive_all(bench.apertures), "bench.apertures",
                "must be a non-empty list of positive values");
        require(!bench.solvers.empty(), "bench.solvers", "must name at least one solver");
        require(bench.warmups >= 0, "bench.warmups", "must be non-negative");
        require(bench.solves >= 1, "bench.solves", "must be at least 1");

        require(pattern.solver != CAPA_SOLVER_MIMO && pattern.solver != CAPA_SOLVER_MIMO_ZF, "pattern.solver",
                "discrete-array solvers have no continuous pattern");
        require(!pattern.users.empty(), "pattern.users", "must list at least one position");
        require(pattern.grid >= 2, "pattern.grid", "must be at least 2");

        require(quadcheck.frequency > 0.0, "quadcheck.frequency", "must be positive");
        require(quadcheck.side > 0.0, "quadcheck.side", "must be positive");
        require(!quadcheck.companions.empty(), "quadcheck.companions", "must list at least one position");
        for (int m : quadcheck.resolved_orders())
            require(m >= 1 && m <= quadcheck.reference_order, "quadcheck.orders",
                    "orders must lie in [1, reference_order]");
        require(quadcheck.reference_order <= 512, "quadcheck.reference_order", "must not exceed 512");
    }

    ExperimentConfig default_config()
    {
        ExperimentConfig c;
        capa_solver_options_default(&c.solver);
        c.fourier = c.solver;
        c.mimo = c.solver;
        return c;
    }

    ExperimentConfig parse_ini(const std::string &text)
    {
        std::istringstream in(text);
        pt::ptree tree;
        try
        {
            pt::read_ini(in, tree);
        }
        catch (const pt::ini_parser_error &e)
        {
            throw ConfigError("line " + std::to_string(e.line()), e.message());
        }
        return apply(raw_from_tree(tree));
    }

    ExperimentConfig parse_json(const std::string &text)
    {
        std::istringstream in(text);
        pt::ptree tree;
        try
        {
            pt::read_json(in, tree);
        }
        catch (const pt::json_parser_error &e)
        {
            throw ConfigError("line " + std::to_string(e.line()), e.message());
        }
        return apply(raw_from_tree(tree));
    }

    ExperimentConfig load_config(const std::string &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw ConfigError(path, "cannot open config file");
        std::ostringstream ss;
        ss << in.rdbuf();
        const bool json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
        return json ? parse_json(ss.str()) : parse_ini(ss.str());
    }

    std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig &config)
    {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto &[section, fields] : schema())
            for (const auto &f : fields)
                out.emplace_back(section + "." + f.key, f.get(config));
        return out;
    }

    std::vector<capa_solver> parse_solver_list(const std::string &text, const std::string &path)
    {
        std::vector<capa_solver> out;
        for (const auto &name : split(text, ", \t"))
        {
            capa_solver s;
            if (capa_solver_from_name(name.c_str(), &s) != CAPA_OK)
                throw ConfigError(path, "unknown solver '" + name + "' (cov, corr-zf, fourier, fourier-zf, mimo, mimo-zf)");
            if (std::find(out.begin(), out.end(), s) != out.end())
                throw ConfigError(path, "solver '" + name + "' listed twice");
            out.push_back(s);
        }
        if (out.empty())
            throw ConfigError(path, "must name at least one solver");
        return out;
    }

    std::string solver_list_string(const std::vector<capa_solver> &solvers)
    {
        std::string out;
        for (std::size_t i = 0; i < solvers.size(); ++i)
            out += (i ? ", " : "") + std::string(capa_solver_name(solvers[i]));
        return out;
    }
}
