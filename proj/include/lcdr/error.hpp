#pragma once

#include <stdexcept>
#include <string>

namespace lcdr {

/// Failure classes. Each maps onto one CLI exit code.
enum class ErrorKind {
  kInvalidInput = 2,
  kInfeasible = 3,
  kDivergence = 4,
  kIo = 1,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

inline Error invalid_input(const std::string& what) {
  return Error(ErrorKind::kInvalidInput, what);
}
inline Error infeasible(const std::string& what) {
  return Error(ErrorKind::kInfeasible, what);
}

}  // namespace lcdr
