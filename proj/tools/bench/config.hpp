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

#ifndef CAPA_BENCH_CONFIG_HPP
#define CAPA_BENCH_CONFIG_HPP

#include "capa/capa.h"

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace capa_bench
{
    // Validation failure; path names the offending field as "section.key".
    class ConfigError : public std::runtime_error
    {
    public:
        ConfigError(std::string path, const std::string &message)
            : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
        const std::string &path() const noexcept { return path_; }

    private:
        std::string path_;
    };

    using Position = std::array<double, 3>;

    struct ScenarioTemplate
    {
        double lx = 0.5;
        double ly = 0.5;
        double frequency = 2.4e9;
        double impedance = 120.0 * 3.14159265358979323846;
        double power_mA2 = 100.0;
        double light_speed = 3e8;
        int num_users = 8;
        double noise_power = 5.6e-3;
        std::optional<double> weight; // unset: 1/K
        double absorption = 1.0;
        Position polarization{0.0, 1.0, 0.0};
        capa_region region{5.0, 5.0, 15.0, 30.0};
    };

    enum class SweepAxis
    {
        none,
        power,     // P_T in mA^2
        aperture,  // A_T in m^2, square aperture
        users,     // K, weights follow 1/K unless fixed
        frequency, // Hz
    };

    const char *axis_name(SweepAxis axis);
    SweepAxis axis_from_name(const std::string &name); // throws ConfigError on unknown names

    struct SweepSettings
    {
        SweepAxis axis = SweepAxis::none;
        std::vector<double> values{0.0};
    };

    struct RunSettings
    {
        std::vector<capa_solver> solvers{CAPA_SOLVER_COV, CAPA_SOLVER_CORR_ZF, CAPA_SOLVER_MIMO, CAPA_SOLVER_MIMO_ZF};
        int realizations = 200;
        std::uint64_t base_seed = 1;
        int threads = 1;
    };

    struct OutputSettings
    {
        std::string dir = ".";
        std::string prefix = "capa";
    };

    struct BenchSettings
    {
        std::vector<double> frequencies{2.4e9, 7.8e9, 15e9};
        std::vector<double> apertures{0.25}; // A_T, m^2
        std::vector<capa_solver> solvers{CAPA_SOLVER_COV, CAPA_SOLVER_CORR_ZF, CAPA_SOLVER_FOURIER,
                                         CAPA_SOLVER_FOURIER_ZF, CAPA_SOLVER_MIMO, CAPA_SOLVER_MIMO_ZF};
        int warmups = 3;
        int solves = 20;
    };

    struct PatternSettings
    {
        capa_solver solver = CAPA_SOLVER_COV;
        std::vector<Position> users{{5.0, 5.0, 15.0}, {5.0, -5.0, 15.0}, {-5.0, 5.0, 15.0}, {-5.0, -5.0, 15.0}};
        int grid = 101;
    };

    struct QuadcheckSettings
    {
        double frequency = 7e9;
        double side = 0.70710678118654752440; // sqrt(0.5)
        Position reference{1.0, 1.0, 30.0};
        std::vector<Position> companions{{2.0, 2.0, 30.0}, {0.0, 0.0, 30.0}, {2.0, 0.0, 30.0}, {0.0, 2.0, 30.0}};
        std::vector<int> orders; // empty: 2, 4, ..., 40
        int reference_order = 64;

        std::vector<int> resolved_orders() const;
    };

    struct ExperimentConfig
    {
        ScenarioTemplate scenario;
        SweepSettings sweep;
        RunSettings run;
        capa_solver_options solver{};  // cov and corr-zf, and the discrete solvers unless overridden
        capa_solver_options fourier{}; // fourier and fourier-zf
        capa_solver_options mimo{};    // mimo and mimo-zf
        OutputSettings output;
        BenchSettings bench;
        PatternSettings pattern;
        QuadcheckSettings quadcheck;

        const capa_solver_options &options_for(capa_solver solver) const;
        // Throws ConfigError naming the first invalid field.
        void validate() const;
    };

    ExperimentConfig default_config();

    // Reads key = value INI (sections as documented in the README) or, for a .json path, the same
    // structure as nested objects. Unknown sections or keys are rejected.
    ExperimentConfig load_config(const std::string &path);
    ExperimentConfig parse_ini(const std::string &text);
    ExperimentConfig parse_json(const std::string &text);

    // Flat (section.key, value) listing of every resolved field, values as written back to INI.
    std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig &config);

    std::vector<capa_solver> parse_solver_list(const std::string &text, const std::string &path);
    std::string solver_list_string(const std::vector<capa_solver> &solvers);
}

#endif
