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

#include "capa/fourier_basis.hpp"
#include "capa/error.hpp"

#include <cmath>
#include <numbers>

namespace capa
{
    int snapped_ceil(double x)
    {
        const double r = std::round(x);
        if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x)))
            return static_cast<int>(r);
        return static_cast<int>(std::ceil(x));
    }

    FourierBasis make_fourier_basis(const Aperture &aperture, int nx, int ny)
    {
        if (nx < 0 || ny < 0)
            throw InvalidArgument("fourier basis: orders must be non-negative");
        FourierBasis b;
        b.aperture = aperture;
        b.nx = nx;
        b.ny = ny;
        b.modes.reserve(static_cast<std::size_t>((2 * nx + 1) * (2 * ny + 1)));
        for (int ix = -nx; ix <= nx; ++ix)
            for (int iy = -ny; iy <= ny; ++iy)
                b.modes.push_back({ix, iy, 0});
        return b;
    }

    FourierBasis truncation(const Aperture &aperture, double wavelength)
    {
        if (!(wavelength > 0.0))
            throw InvalidArgument("truncation: wavelength must be positive");
        return make_fourier_basis(aperture, snapped_ceil(aperture.lx / wavelength), snapped_ceil(aperture.ly / wavelength));
    }

    std::complex<double> basis_eval(const FourierBasis &basis, std::size_t mode_index, const Vec3 &s)
    {
        const auto &n = basis.modes.at(mode_index);
        const double lx = basis.aperture.lx;
        const double ly = basis.aperture.ly;
        const double phase = 2.0 * std::numbers::pi * (n[0] * (s.x - 0.5 * lx) / lx + n[1] * (s.y - 0.5 * ly) / ly);
        return std::polar(1.0 / std::sqrt(basis.aperture.area()), phase);
    }
}
