// SPDX-License-Identifier: Apache-2.0
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

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace bsar {

enum class ErrorCode {
    parameter,
    format,
    configuration,
    unsuitable_scene,
    convergence,
    degenerate_input,
    degenerate_fit,
    no_signal,
    tracking,
    implausible_migration,
    no_target,
};

inline std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::parameter: return "parameter";
    case ErrorCode::format: return "format";
    case ErrorCode::configuration: return "configuration";
    case ErrorCode::unsuitable_scene: return "unsuitable_scene";
    case ErrorCode::convergence: return "convergence";
    case ErrorCode::degenerate_input: return "degenerate_input";
    case ErrorCode::degenerate_fit: return "degenerate_fit";
    case ErrorCode::no_signal: return "no_signal";
    case ErrorCode::tracking: return "tracking";
    case ErrorCode::implausible_migration: return "implausible_migration";
    case ErrorCode::no_target: return "no_target";
    }
    return "unknown";
}

// Process exit status used by the command-line tool.
//   2 parameter / configuration, 3 format, 4 scene not usable for blind
//   processing, 5 convergence.
inline int exit_status(ErrorCode code)
{
    switch (code) {
    case ErrorCode::parameter:
    case ErrorCode::configuration:
    case ErrorCode::degenerate_input:
        return 2;
    case ErrorCode::format:
        return 3;
    case ErrorCode::unsuitable_scene:
    case ErrorCode::degenerate_fit:
    case ErrorCode::no_signal:
    case ErrorCode::tracking:
    case ErrorCode::implausible_migration:
    case ErrorCode::no_target:
        return 4;
    case ErrorCode::convergence:
        return 5;
    }
    return 1;
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }
    int exit_status() const noexcept { return bsar::exit_status(code_); }

    // Pipeline stage that raised the error, empty when raised outside a pipeline.
    const std::string& stage() const noexcept { return stage_; }
    void set_stage(std::string stage) { stage_ = std::move(stage); }

private:
    ErrorCode code_;
    std::string stage_;
};

class ParameterError : public Error {
public:
    explicit ParameterError(const std::string& message) : Error(ErrorCode::parameter, message) {}
};

class FormatError : public Error {
public:
    FormatError(const std::string& message, std::uint64_t byte_offset)
        : Error(ErrorCode::format, message + " (at byte offset " + std::to_string(byte_offset) + ")"),
          offset_(byte_offset) {}

    std::uint64_t byte_offset() const noexcept { return offset_; }

private:
    std::uint64_t offset_;
};

class ConfigurationError : public Error {
public:
    explicit ConfigurationError(const std::string& message) : Error(ErrorCode::configuration, message) {}
};

class UnsuitableSceneError : public Error {
public:
    explicit UnsuitableSceneError(const std::string& message) : Error(ErrorCode::unsuitable_scene, message) {}
};

class DegenerateInputError : public Error {
public:
    explicit DegenerateInputError(const std::string& message) : Error(ErrorCode::degenerate_input, message) {}
};

class DegenerateFitError : public Error {
public:
    explicit DegenerateFitError(const std::string& message) : Error(ErrorCode::degenerate_fit, message) {}
};

class NoSignalError : public Error {
public:
    explicit NoSignalError(const std::string& message) : Error(ErrorCode::no_signal, message) {}
};

class TrackingError : public Error {
public:
    explicit TrackingError(const std::string& message) : Error(ErrorCode::tracking, message) {}
};

class ImplausibleMigrationError : public Error {
public:
    explicit ImplausibleMigrationError(const std::string& message)
        : Error(ErrorCode::implausible_migration, message) {}
};

class NoTargetError : public Error {
public:
    explicit NoTargetError(const std::string& message) : Error(ErrorCode::no_target, message) {}
};

}  // namespace bsar
