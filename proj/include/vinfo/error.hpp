#ifndef VINFO_ERROR_HPP
#define VINFO_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vinfo {

// Every failure raised by the library derives from Error so callers can
// translate the category into an exit code without string matching.
enum class ErrorKind { Argument, Shape, Numeric, Format, Length, Parse, Data, Config, Composition, Training, Merge };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what) : Error(ErrorKind::Argument, what) {}
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error(ErrorKind::Shape, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorKind::Numeric, what) {}
};

class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : Error(ErrorKind::Format, what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class LengthError : public Error {
 public:
  LengthError(const std::string& what, std::size_t offset)
      : Error(ErrorKind::Length, what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, const std::string& unit = "line")
      : Error(ErrorKind::Parse, what + " (" + unit + " " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

class CompositionError : public Error {
 public:
  explicit CompositionError(const std::string& what) : Error(ErrorKind::Composition, what) {}
};

class MergeError : public Error {
 public:
  explicit MergeError(const std::string& what) : Error(ErrorKind::Merge, what) {}
};

}  // namespace vinfo

#endif  // VINFO_ERROR_HPP
