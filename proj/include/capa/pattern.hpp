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

#ifndef CAPA_PATTERN_HPP
#define CAPA_PATTERN_HPP

#include "capa/fourier_basis.hpp"
#include "capa/linalg.hpp"
#include "capa/scenario.hpp"

#include <memory>
#include <variant>

namespace capa
{
    // J(s) = sum_j c_j conj(H_j(s)) over the users of a scenario.
    struct ConjugateChannelBasis
    {
        std::shared_ptr<const Scenario> scenario;
    };

    // J(s) = sum_n v_n Phi_n(s).
    struct FourierModeBasis
    {
        FourierBasis basis;
    };

    // A continuous source-current pattern, evaluable anywhere on the aperture.
    class BeamPattern
    {
    public:
        using Basis = std::variant<ConjugateChannelBasis, FourierModeBasis>;

        BeamPattern(Basis basis, ComplexVector coefficients);

        static BeamPattern conjugate_channels(std::shared_ptr<const Scenario> scenario, ComplexVector coefficients);
        static BeamPattern fourier_modes(FourierBasis basis, ComplexVector coefficients);

        std::complex<double> operator()(const Vec3 &s) const;

        const ComplexVector &coefficients() const { return coefficients_; }
        const Basis &basis() const { return basis_; }
        const Aperture &aperture() const;
        bool over_conjugate_channels() const { return std::holds_alternative<ConjugateChannelBasis>(basis_); }

        BeamPattern scaled(double factor) const;

    private:
        Basis basis_;
        ComplexVector coefficients_;
    };
}

#endif
