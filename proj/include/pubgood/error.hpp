#ifndef PUBGOOD_ERROR_HPP
#define PUBGOOD_ERROR_HPP

#include <stdexcept>
#include <string>

namespace pubgood {

enum class ErrorCode {
  InvalidArgument,
  Parse,
  Validation,
  Domain,
  Numerical,
  Index,
  Length,
  Bracket,
  TooLarge,
  Io,
};

/// Library-wide exception. `code()` distinguishes the failure class so the
/// C wrapper can map it onto a status value without string matching.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

}  // namespace pubgood

#endif
