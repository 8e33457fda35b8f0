#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace phishdqn {

/// Raised when a string has no recognizable scheme://authority structure.
struct MalformedUrl : std::runtime_error {
    explicit MalformedUrl(const std::string& what) : std::runtime_error(what) {}
};

/// Raised in error_on_missing mode; names the absent evidence fields.
struct MissingEvidence : std::runtime_error {
    MissingEvidence(const std::string& what, std::vector<std::string> fields)
        : std::runtime_error(what), missing_fields(std::move(fields)) {}
    std::vector<std::string> missing_fields;
};

struct BadLabel : std::runtime_error {
    BadLabel(const std::string& what, std::size_t row) : std::runtime_error(what), row_index(row) {}
    std::size_t row_index;
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateSplit : std::runtime_error {
    explicit DegenerateSplit(const std::string& what) : std::runtime_error(what) {}
};

struct InsufficientExperience : std::runtime_error {
    explicit InsufficientExperience(const std::string& what) : std::runtime_error(what) {}
};

struct NonFiniteLoss : std::runtime_error {
    explicit NonFiniteLoss(const std::string& what) : std::runtime_error(what) {}
};

struct VersionMismatch : std::runtime_error {
    explicit VersionMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct CorruptFile : std::runtime_error {
    explicit CorruptFile(const std::string& what) : std::runtime_error(what) {}
};

struct LengthMismatch : std::runtime_error {
    explicit LengthMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyInput : std::runtime_error {
    explicit EmptyInput(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace phishdqn
