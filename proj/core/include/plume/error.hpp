#pragma once

#include <stdexcept>
#include <string>

namespace plume {

/// Process exit codes used by the command-line front end.
enum class ExitCode : int {
  kOk = 0,
  kGeneric = 1,
  kConfig = 2,
  kStaleArtifact = 3,
  kResourceLimit = 4,
  kInvariant = 5,
};

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  [[nodiscard]] virtual ExitCode exit_code() const noexcept { return ExitCode::kGeneric; }
};

/// A configuration value violates its documented range or is missing.
class ConfigError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::kConfig; }
};

/// A JSON document does not follow its schema. The message names the offending path.
class ParseError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// A recorded artifact is missing or its digest no longer matches.
class StaleArtifactError : public Error {
 public:
  StaleArtifactError(std::string file, const std::string& what)
      : Error(what), file_(std::move(file)) {}
  [[nodiscard]] const std::string& file() const noexcept { return file_; }
  [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::kStaleArtifact; }

 private:
  std::string file_;
};

/// A computation would exceed a configured resource budget.
class ResourceLimitError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::kResourceLimit; }
};

/// A precondition of an operation was not met by the caller.
class ContractViolation : public Error {
 public:
  using Error::Error;
  [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::kInvariant; }
};

/// Loaded data breaks a structural invariant (asymmetric edges, non-monotone stages, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::kInvariant; }
};

/// A probability distribution has no mass left to sample from.
class DegenerateDistributionError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::kInvariant; }
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace plume
