#pragma once

#include <stdexcept>
#include <string>

namespace daa {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file; the message carries the line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, int line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Invalid configuration or flag combination.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace daa
