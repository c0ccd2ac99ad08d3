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

#include "format.hpp"

#include <charconv>
#include <cmath>

namespace capa_bench
{
    std::string format_double(double value)
    {
        if (std::isnan(value))
            return "nan";
        if (std::isinf(value))
            return value > 0 ? "inf" : "-inf";
        char buf[64];
        const auto res = std::to_chars(buf, buf + sizeof(buf), value);
        return std::string(buf, res.ptr);
    }

    std::string csv_field(std::string_view text)
    {
        if (text.find_first_of(",\"\r\n") == std::string_view::npos)
            return std::string(text);
        std::string out = "\"";
        for (char c : text)
        {
            if (c == '"')
                out += '"';
            out += c;
        }
        out += '"';
        return out;
    }

    void write_csv_row(std::ostream &out, const std::vector<std::string> &fields)
    {
        for (std::size_t i = 0; i < fields.size(); ++i)
        {
            if (i > 0)
                out << ',';
            out << csv_field(fields[i]);
        }
        out << "\r\n";
    }

    void write_csv_preamble(std::ostream &out, const std::vector<std::pair<std::string, std::string>> &entries)
    {
        for (const auto &[key, value] : entries)
            out << "# " << key << " = " << value << "\r\n";
    }
}
