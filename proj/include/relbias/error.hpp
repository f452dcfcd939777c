#pragma once

#include <stdexcept>
#include <string>

namespace relbias {

/// Raised when a model, dataset or experiment description is inconsistent
/// (dimension mismatch, infeasible class, empty split part, ...).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Bad command-line or API usage (unknown format, unknown id).
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A training run produced a non-finite loss.
class TrainingDiverged : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace relbias
