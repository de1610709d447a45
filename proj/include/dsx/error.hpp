#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dsx {

// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LexError : public Error {
 public:
  LexError(std::size_t line, std::size_t column, const std::string& message)
      : Error("lex error at " + std::to_string(line) + ":" +
              std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, std::size_t column, const std::string& message)
      : Error("syntax error at " + std::to_string(line) + ":" +
              std::to_string(column) + ": " + message),
        line_(line),
        column_(column),
        detail_(message) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& detail() const { return detail_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string detail_;
};

// A placeholder, wildcard or `_` was found while parsing plain code.
class QueryTokenInCodeMode : public SyntaxError {
 public:
  using SyntaxError::SyntaxError;
};

// Wraps a lex/syntax error in one side of a query.
class QueryParseError : public Error {
 public:
  QueryParseError(std::string side, std::size_t line, std::size_t column,
                  const std::string& message)
      : Error(side + " query: " + message),
        side_(std::move(side)),
        line_(line),
        column_(column),
        detail_(message) {}

  const std::string& side() const { return side_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& detail() const { return detail_; }

 private:
  std::string side_;
  std::size_t line_;
  std::size_t column_;
  std::string detail_;
};

class DiffFormatError : public Error {
 public:
  DiffFormatError(std::size_t line, const std::string& message)
      : Error("diff format error at line " + std::to_string(line) + ": " +
              message),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class CorpusFormatError : public Error {
 public:
  CorpusFormatError(std::size_t line, const std::string& message)
      : Error("corpus format error at line " + std::to_string(line) + ": " +
              message),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class IndexFormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class IndexMismatch : public Error {
 public:
  using Error::Error;
};

class EmptyCorpus : public Error {
 public:
  using Error::Error;
};

// A change that violates the CodeChange invariants.
class InvalidChange : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace dsx
