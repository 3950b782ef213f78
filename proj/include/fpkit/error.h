#ifndef FPKIT_ERROR_H_
#define FPKIT_ERROR_H_

#include <stdexcept>
#include <string>

namespace fpkit {

// Base class for every error raised by the toolkit. The code is a short
// machine-readable token that the CLI and the HTTP layer surface verbatim.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& message)
      : Error("schema_mismatch", message) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message)
      : Error("config_error", message) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& message)
      : Error("parse_error", message) {}
};

class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& message)
      : Error("argument_error", message) {}
};

}  // namespace fpkit

#endif  // FPKIT_ERROR_H_
