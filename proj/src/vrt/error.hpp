#pragma once

#include <stdexcept>
#include <string>

namespace vrt {

enum class ErrorKind {
  Argument,
  Domain,
  Parse,
  Geometry,
  Extent,
  Config,
  Io,
  Evaluation,
  Validation,  ///< a result failed a stated check (nesting, oracle)
};

const char* to_string(ErrorKind kind) noexcept;

/// Single exception type for the engine; the kind maps onto C API status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace vrt
