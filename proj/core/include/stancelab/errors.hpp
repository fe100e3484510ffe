#pragma once

#include <stdexcept>
#include <string>

namespace stancelab {

// Invalid configuration, bad CLI arguments, out-of-range hyperparameters.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or inconsistent survey data, splits, corpora and score files.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Degenerate statistical input (zero variance, empty samples, ...).
class MetricError : public std::runtime_error {
 public:
  explicit MetricError(const std::string& what) : std::runtime_error(what) {}
};

// Training aborted (non-finite loss, backend failure).
class TrainingError : public std::runtime_error {
 public:
  explicit TrainingError(const std::string& what) : std::runtime_error(what) {}
};

// Socket / external endpoint failures.
class RemoteError : public std::runtime_error {
 public:
  explicit RemoteError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace stancelab
