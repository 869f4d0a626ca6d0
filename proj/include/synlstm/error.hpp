#pragma once

#include <stdexcept>
#include <string>

namespace synlstm {

// Base class for every error raised by the library. The CLI maps the
// concrete subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor shapes do not line up for an operation.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A documented precondition was violated by the caller.
class ContractError : public Error {
 public:
  using Error::Error;
};

// An object was used in a state that forbids the call (e.g. double backward).
class StateError : public Error {
 public:
  using Error::Error;
};

// Malformed corpus line.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Dependency heads that do not form a single rooted tree.
class TreeError : public Error {
 public:
  TreeError(const std::string& msg, std::size_t sentence_index)
      : Error("sentence " + std::to_string(sentence_index) + ": " + msg),
        sentence_(sentence_index) {}
  std::size_t sentence_index() const noexcept { return sentence_; }

 private:
  std::size_t sentence_;
};

// Label sequence invalid under the declared segment encoding.
class SchemeError : public Error {
 public:
  SchemeError(const std::string& msg, std::size_t index)
      : Error("label " + std::to_string(index) + ": " + msg), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

// Embedding files, checkpoints and config files with bad structure.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Values outside their admissible domain (e.g. gate activations outside [0,1]).
class DataIntegrityError : public Error {
 public:
  using Error::Error;
};

// Non-finite loss during training.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace synlstm
