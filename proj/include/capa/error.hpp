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

#ifndef CAPA_ERROR_HPP
#define CAPA_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace capa
{
    // Error categories; the C API maps these one-to-one onto capa_status codes.
    enum class ErrorCode
    {
        invalid_argument,
        domain,
        singular_matrix,
        not_positive_definite,
        ill_conditioned,
        degenerate,
        internal
    };

    class Error : public std::runtime_error
    {
    public:
        Error(ErrorCode code, const std::string &what) : std::runtime_error(what), code_(code) {}
        ErrorCode code() const noexcept { return code_; }

    private:
        ErrorCode code_;
    };

    class InvalidArgument : public Error
    {
    public:
        explicit InvalidArgument(const std::string &what) : Error(ErrorCode::invalid_argument, what) {}
    };

    // Evaluation outside the domain of a formula, e.g. the Green's kernel at coincident points.
    class DomainError : public Error
    {
    public:
        explicit DomainError(const std::string &what) : Error(ErrorCode::domain, what) {}
    };

    class SingularMatrixError : public Error
    {
    public:
        SingularMatrixError(std::size_t pivot, const std::string &what)
            : Error(ErrorCode::singular_matrix, what), pivot_(pivot) {}
        std::size_t pivot_index() const noexcept { return pivot_; }

    private:
        std::size_t pivot_;
    };

    class NotPositiveDefiniteError : public Error
    {
    public:
        NotPositiveDefiniteError(std::size_t pivot, const std::string &what)
            : Error(ErrorCode::not_positive_definite, what), pivot_(pivot) {}
        std::size_t pivot_index() const noexcept { return pivot_; }

    private:
        std::size_t pivot_;
    };

    class IllConditionedError : public Error
    {
    public:
        IllConditionedError(double estimate, const std::string &what)
            : Error(ErrorCode::ill_conditioned, what), estimate_(estimate) {}
        double condition_estimate() const noexcept { return estimate_; }

    private:
        double estimate_;
    };

    // A solver state that carries no information (all-zero channels or auxiliaries).
    class DegenerateError : public Error
    {
    public:
        explicit DegenerateError(const std::string &what) : Error(ErrorCode::degenerate, what) {}
    };

    class InternalError : public Error
    {
    public:
        explicit InternalError(const std::string &what) : Error(ErrorCode::internal, what) {}
    };
}

#endif
