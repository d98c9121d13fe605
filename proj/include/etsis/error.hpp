/*
* Copyright (C) 2026 The etsis authors
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
#ifndef ETSIS_ERROR_HPP
#define ETSIS_ERROR_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace etsis
{

/// Base class of all errors thrown by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Inputs violate a documented precondition (dimension, box, sign, ...).
class InvalidArgument : public Error
{
public:
    using Error::Error;
};

/// Malformed file content. `line` is 1-based, 0 when not applicable.
class ParseError : public Error
{
public:
    ParseError(const std::string& file, std::size_t line, const std::string& what)
        : Error(file + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + what)
        , m_line(line)
    {
    }
    std::size_t line() const
    {
        return m_line;
    }

private:
    std::size_t m_line;
};

class IoError : public Error
{
public:
    using Error::Error;
};

/// The ODE integration left the admissible state box or produced NaN/Inf.
class IntegrationError : public Error
{
public:
    using Error::Error;
};

/// The certificate machinery itself failed (e.g. the symmetrized Q is not
/// positive definite). Distinct from a failed verdict.
class CertificateError : public Error
{
public:
    using Error::Error;
};

/// A design stage has no solution. `stage` names the pipeline stage,
/// `offending` lists objective or node indices responsible, if known.
class InfeasibleError : public Error
{
public:
    InfeasibleError(std::string stage, const std::string& what, std::vector<std::size_t> offending = {})
        : Error(stage + ": " + what)
        , m_stage(std::move(stage))
        , m_offending(std::move(offending))
    {
    }
    const std::string& stage() const
    {
        return m_stage;
    }
    const std::vector<std::size_t>& offending() const
    {
        return m_offending;
    }

private:
    std::string m_stage;
    std::vector<std::size_t> m_offending;
};

} // namespace etsis

#endif // ETSIS_ERROR_HPP
