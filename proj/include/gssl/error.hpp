#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gssl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter is outside its documented domain (k >= n, alpha outside (0,1), ...).
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// A graph cannot be used as requested (isolated node, disconnected pair, ...).
class GraphError : public Error {
 public:
  using Error::Error;
};

/// A linear system or factorization failed numerically.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file or document. The message carries the line number when known.
class ParseError : public Error {
 public:
  using Error::Error;
};

using WarningHandler = std::function<void(std::string_view)>;

/// Installs the sink for non-fatal diagnostics and returns the previous one.
/// The default handler writes to stderr. Passing an empty function silences warnings.
WarningHandler set_warning_handler(WarningHandler handler);

void warn(std::string_view message);

}  // namespace gssl
