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

#ifndef CAPA_FOURIER_BASIS_HPP
#define CAPA_FOURIER_BASIS_HPP

#include "capa/scenario.hpp"

#include <array>
#include <complex>
#include <vector>

namespace capa
{
    // Truncated orthonormal Fourier basis over a planar rectangular aperture:
    //   Phi_n(s) = A^{-1/2} exp(j 2 pi (n_x (s_x - lx/2) / lx + n_y (s_y - ly/2) / ly)),  |n_x| <= N_x, |n_y| <= N_y.
    // Planar apertures have no z extent, so N_z = 0.
    struct FourierBasis
    {
        Aperture aperture;
        int nx = 0;
        int ny = 0;
        int nz = 0;
        std::vector<std::array<int, 3>> modes; // n_x outer, n_y inner

        std::size_t size() const { return modes.size(); }
    };

    FourierBasis make_fourier_basis(const Aperture &aperture, int nx, int ny);

    // N_x = ceil(lx / lambda), N_y = ceil(ly / lambda).
    FourierBasis truncation(const Aperture &aperture, double wavelength);

    // ceil(x) that treats values within 1e-9 relative of an integer as that integer.
    int snapped_ceil(double x);

    std::complex<double> basis_eval(const FourierBasis &basis, std::size_t mode_index, const Vec3 &s);
}

#endif
