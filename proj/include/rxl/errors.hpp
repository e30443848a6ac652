#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rxl {

struct SourcePos {
  std::uint32_t line = 0;
  std::uint32_t column = 0;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(SourcePos pos, const std::string& message);
  SourcePos pos() const noexcept { return pos_; }
  const std::string& message() const noexcept { return message_; }

 private:
  SourcePos pos_;
  std::string message_;
};

enum class RuntimeErrorKind {
  UndefinedVariable,
  NotCallable,
  BadMemberTarget,
  DivisionTypes,
  AssertionFailed,
  StackOverflow,
};

const char* runtime_error_name(RuntimeErrorKind k);

class RuntimeError : public Error {
 public:
  RuntimeError(RuntimeErrorKind kind, const std::string& message, SourcePos pos = {});
  RuntimeErrorKind kind() const noexcept { return kind_; }
  SourcePos pos() const noexcept { return pos_; }

 private:
  RuntimeErrorKind kind_;
  SourcePos pos_;
};

enum class ReactiveErrorKind {
  DisposedHandle,
  ForeignHandle,
  PropagationLoop,
  UnsupportedStrategy,
  CyclicSignal,
  NonlinearConstraint,
  UnsupportedRelation,
  UnsatisfiableSystem,
  UntrackedClass,
  NoSuchBaseMethod,
  RewriteError,
  MismatchedOutput,
};

const char* reactive_error_name(ReactiveErrorKind k);

class ReactiveError : public Error {
 public:
  ReactiveError(ReactiveErrorKind kind, const std::string& message);
  ReactiveErrorKind kind() const noexcept { return kind_; }

 private:
  ReactiveErrorKind kind_;
};

}  // namespace rxl
