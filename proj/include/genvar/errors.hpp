#ifndef GENVAR_ERRORS_HPP
#define GENVAR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace genvar {

// Malformed input file (bad JSON, bad record shape). Carries the source
// location when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what),
        file_(file),
        line_(line) {}
  explicit ParseError(const std::string& what) : std::runtime_error(what), line_(0) {}

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  std::string file_;
  std::size_t line_ = 0;
};

// Well-formed input that violates a data contract (invariant, schema, or
// operation precondition).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Token sequences that cannot be paired up as substitutions.
class AlignmentError : public DataError {
 public:
  using DataError::DataError;
};

// Chat transport failure (network, bad status, retries exhausted).
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace genvar

#endif
