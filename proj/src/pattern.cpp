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

#include "capa/pattern.hpp"
#include "capa/em.hpp"
#include "capa/error.hpp"

namespace capa
{
    BeamPattern::BeamPattern(Basis basis, ComplexVector coefficients)
        : basis_(std::move(basis)), coefficients_(std::move(coefficients))
    {
        const std::size_t expected = std::visit(
            [](const auto &b) -> std::size_t
            {
                using T = std::decay_t<decltype(b)>;
                if constexpr (std::is_same_v<T, ConjugateChannelBasis>)
                {
                    if (!b.scenario)
                        throw InvalidArgument("BeamPattern: conjugate-channel basis needs a scenario");
                    return b.scenario->num_users();
                }
                else
                    return b.basis.size();
            },
            basis_);
        if (static_cast<std::size_t>(coefficients_.size()) != expected)
            throw InvalidArgument("BeamPattern: coefficient count does not match the basis size");
    }

    BeamPattern BeamPattern::conjugate_channels(std::shared_ptr<const Scenario> scenario, ComplexVector coefficients)
    {
        return BeamPattern(ConjugateChannelBasis{std::move(scenario)}, std::move(coefficients));
    }

    BeamPattern BeamPattern::fourier_modes(FourierBasis basis, ComplexVector coefficients)
    {
        return BeamPattern(FourierModeBasis{std::move(basis)}, std::move(coefficients));
    }

    const Aperture &BeamPattern::aperture() const
    {
        if (const auto *cc = std::get_if<ConjugateChannelBasis>(&basis_))
            return cc->scenario->aperture;
        return std::get<FourierModeBasis>(basis_).basis.aperture;
    }

    std::complex<double> BeamPattern::operator()(const Vec3 &s) const
    {
        std::complex<double> acc = 0.0;
        if (const auto *cc = std::get_if<ConjugateChannelBasis>(&basis_))
        {
            const Scenario &sc = *cc->scenario;
            for (std::size_t j = 0; j < sc.num_users(); ++j)
                acc += coefficients_[static_cast<Eigen::Index>(j)] * std::conj(channel_response(sc, j, s));
            return acc;
        }
        const auto &fb = std::get<FourierModeBasis>(basis_).basis;
        for (std::size_t n = 0; n < fb.size(); ++n)
            acc += coefficients_[static_cast<Eigen::Index>(n)] * basis_eval(fb, n, s);
        return acc;
    }

    BeamPattern BeamPattern::scaled(double factor) const
    {
        return BeamPattern(basis_, coefficients_ * factor);
    }
}
