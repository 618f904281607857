/*
 * Copyright (C) 2026 The regflow Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef REGFLOW_ERRORS_HPP
#define REGFLOW_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace regflow
{

/// Non-finite or out-of-domain numeric input to a model function.
class DomainError : public std::domain_error
{
public:
    DomainError(const std::string& field, const std::string& what)
        : std::domain_error(what)
        , field_(field)
    {
    }

    const std::string& field() const noexcept
    {
        return field_;
    }

private:
    std::string field_;
};

/// Invalid call arguments, configuration or input files.
class ArgumentError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Integration produced a non-finite value. step() is the index of the failing step.
class NumericalError : public std::runtime_error
{
public:
    NumericalError(std::size_t step, const std::string& what)
        : std::runtime_error(what + " (step " + std::to_string(step) + ")")
        , step_(step)
    {
    }

    std::size_t step() const noexcept
    {
        return step_;
    }

private:
    std::size_t step_;
};

/// A statistic is undefined for the supplied data.
class DegenerateError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} // namespace regflow

#endif // REGFLOW_ERRORS_HPP
