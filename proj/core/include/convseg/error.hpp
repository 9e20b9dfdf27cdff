#pragma once

#include <stdexcept>
#include <string>

namespace convseg {

/// Broad failure category. The CLI maps each kind onto a process exit code.
enum class ErrorKind {
  kValidation,  // bad input values, broken invariants, misaligned data
  kIo,          // unreadable / unwritable files, malformed documents on disk
  kService,     // remote embedding service failures
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ErrorKind::kValidation, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::kIo, what) {}
};

class ServiceError : public Error {
 public:
  explicit ServiceError(const std::string& what) : Error(ErrorKind::kService, what) {}
};

}  // namespace convseg
