#pragma once

#include <stdexcept>
#include <string>

namespace twophase {

enum class ErrorKind {
  InvalidArgument,
  Numerical,
  Io,
  Parse,
};

// Single exception type for the C++ core. The C API maps `kind()` onto
// status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace twophase
