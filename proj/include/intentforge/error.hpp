// intentforge/error.hpp

#ifndef INTENTFORGE_ERROR_HPP
#define INTENTFORGE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace intentforge {

// Base error for everything raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad input data or configuration: malformed records, contract violations,
// unknown config keys. The CLI maps these to exit code 1; all other errors
// exit with code 2.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& msg) : Error(msg) {}
};

}  // namespace intentforge

#endif  // INTENTFORGE_ERROR_HPP
