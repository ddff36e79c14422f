#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pwlr {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A mandatory file is missing or unreadable.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed dataset input. Carries the file and 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what), file_(file), line_(line) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

/// Arguments or data that violate an operation's preconditions.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A node whose neighbourhood carries no label mass.
class DegenerateLabelError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// An event degree tuple is missing from the supplied vocabulary.
class VocabularyError : public Error {
 public:
  using Error::Error;
};

/// Iterative method failed to reach its tolerance.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double residual) : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// A class cannot be spread over the requested folds.
class StratificationError : public Error {
 public:
  using Error::Error;
};

}  // namespace pwlr
