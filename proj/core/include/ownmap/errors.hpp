#pragma once

#include <stdexcept>
#include <string>

namespace ownmap {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid input: malformed files, violated invariants, bad parameters.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(what) {}
};

/// File system / serialization failures.
class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what) {}
};

/// A scoring or interpretation backend produced unusable output.
/// Carries the raw response so the caller can log it or retry.
class BackendError : public Error {
public:
    BackendError(const std::string& what, std::string raw_text)
        : Error(what), raw_text_(std::move(raw_text)) {}

    const std::string& raw_text() const noexcept { return raw_text_; }

private:
    std::string raw_text_;
};

/// Too few calibration samples for the requested error level.
class CalibrationError : public Error {
public:
    CalibrationError(const std::string& what, std::size_t min_samples)
        : Error(what), min_samples_(min_samples) {}

    std::size_t min_samples() const noexcept { return min_samples_; }

private:
    std::size_t min_samples_;
};

/// Operation invalid in the current acquisition state (e.g. re-asking).
class StateError : public Error {
public:
    explicit StateError(const std::string& what) : Error(what) {}
};

}  // namespace ownmap
