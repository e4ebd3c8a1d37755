#ifndef ATOMWAVE_ERROR_HPP
#define ATOMWAVE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace atomwave {

enum class ErrorKind {
  InvalidArgument,  // precondition on inputs violated
  Degenerate,       // formula undefined at this point (zero denominator, ...)
  Numerical,        // integration failed: non-finite state, step underflow
  Io,
  Usage,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::Degenerate: return "degenerate";
    case ErrorKind::Numerical: return "numerical";
    case ErrorKind::Io: return "io";
    case ErrorKind::Usage: return "usage";
  }
  return "unknown";
}

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

}  // namespace atomwave

#endif  // ATOMWAVE_ERROR_HPP
