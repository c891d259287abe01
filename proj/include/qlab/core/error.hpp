#pragma once

#include <stdexcept>
#include <string>

namespace qlab {

enum class ErrorKind {
  domain,
  resolution,
  truncation,
  singular_point,
  numeric,
  config,
  io,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::resolution: return "resolution";
    case ErrorKind::truncation: return "truncation";
    case ErrorKind::singular_point: return "singular-point";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

/// Every failure raised by the library. `module()` names the subsystem that
/// raised it so the CLI can report provenance.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, const std::string& what)
      : std::runtime_error(what), kind_(kind), module_(std::move(module)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorKind kind_;
  std::string module_;
};

namespace detail {

[[noreturn]] inline void raise(ErrorKind kind, const std::string& module,
                               const std::string& what) {
  throw Error(kind, module, what);
}

inline void require(bool ok, ErrorKind kind, const char* module,
                    const std::string& what) {
  if (!ok) raise(kind, module, what);
}

}  // namespace detail
}  // namespace qlab
