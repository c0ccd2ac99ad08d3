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

#ifndef CAPA_BENCH_FORMAT_HPP
#define CAPA_BENCH_FORMAT_HPP

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace capa_bench
{
    // Shortest representation that reads back to the same double.
    std::string format_double(double value);

    // RFC-4180 field: quoted when it holds a comma, quote or line break.
    std::string csv_field(std::string_view text);

    void write_csv_row(std::ostream &out, const std::vector<std::string> &fields);

    // "# key = value" provenance lines placed ahead of a CSV header.
    void write_csv_preamble(std::ostream &out, const std::vector<std::pair<std::string, std::string>> &entries);
}

#endif
