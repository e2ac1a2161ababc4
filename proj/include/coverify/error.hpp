// Copyright (C) 2026 coverify contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace coverify {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed text input. Carries the 1-based line number of the offending token.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& message)
        : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Well-formed input that violates a semantic rule (duplicate names, bad shapes, count mismatch).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Inconsistent run configuration (stage/mode combination, fault target, option ranges).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Failure while executing a network (stream errors, accumulator overflow).
class EngineError : public Error {
public:
    using Error::Error;
};

/// Not enough correctly predicted calibration images to build an envelope file.
class CalibrationError : public Error {
public:
    CalibrationError(std::size_t kept, std::size_t required)
        : Error("insufficient correctly predicted images: kept " + std::to_string(kept) + " of " +
                std::to_string(required) + " required"),
          kept_(kept) {}

    std::size_t kept() const noexcept { return kept_; }

private:
    std::size_t kept_;
};

/// Two artifacts that should describe the same network disagree on layer names or counts.
class StructureError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace coverify
