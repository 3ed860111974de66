#ifndef ARI_ERROR_HPP
#define ARI_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ari {

/// Invalid caller-supplied data (p-values, thresholds, sizes).
class InputError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed text input; carries the source name and 1-based line.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + what),
        source_(source), line_(line) {}

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

private:
  std::string source_;
  std::size_t line_;
};

/// Structural problems in binary files (bad magic, version, truncated data).
class FormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace ari

#endif // ARI_ERROR_HPP
