#pragma once

#include <stdexcept>
#include <string>

namespace dualmem {

/// Bad flags or flag combinations. CLI exit code 1.
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

/// Unreadable or unwritable paths. CLI exit code 2.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed file contents: bad config keys, CSV schema mismatches. CLI
/// exit code 3.
class SchemaError : public std::runtime_error {
public:
    explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dualmem
