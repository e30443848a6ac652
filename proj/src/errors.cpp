#include "rxl/errors.hpp"

namespace rxl {
namespace {

std::string at(SourcePos pos) {
  if (pos.line == 0) return "";
  return " at " + std::to_string(pos.line) + ":" + std::to_string(pos.column);
}

}  // namespace

SyntaxError::SyntaxError(SourcePos pos, const std::string& message)
    : Error("SyntaxError" + at(pos) + ": " + message), pos_(pos), message_(message) {}

const char* runtime_error_name(RuntimeErrorKind k) {
  switch (k) {
    case RuntimeErrorKind::UndefinedVariable: return "UndefinedVariable";
    case RuntimeErrorKind::NotCallable: return "NotCallable";
    case RuntimeErrorKind::BadMemberTarget: return "BadMemberTarget";
    case RuntimeErrorKind::DivisionTypes: return "DivisionTypes";
    case RuntimeErrorKind::AssertionFailed: return "AssertionFailed";
    case RuntimeErrorKind::StackOverflow: return "StackOverflow";
  }
  return "RuntimeError";
}

RuntimeError::RuntimeError(RuntimeErrorKind kind, const std::string& message, SourcePos pos)
    : Error(std::string(runtime_error_name(kind)) + at(pos) + ": " + message), kind_(kind), pos_(pos) {}

const char* reactive_error_name(ReactiveErrorKind k) {
  switch (k) {
    case ReactiveErrorKind::DisposedHandle: return "DisposedHandle";
    case ReactiveErrorKind::ForeignHandle: return "ForeignHandle";
    case ReactiveErrorKind::PropagationLoop: return "PropagationLoop";
    case ReactiveErrorKind::UnsupportedStrategy: return "UnsupportedStrategy";
    case ReactiveErrorKind::CyclicSignal: return "CyclicSignal";
    case ReactiveErrorKind::NonlinearConstraint: return "NonlinearConstraint";
    case ReactiveErrorKind::UnsupportedRelation: return "UnsupportedRelation";
    case ReactiveErrorKind::UnsatisfiableSystem: return "UnsatisfiableSystem";
    case ReactiveErrorKind::UntrackedClass: return "UntrackedClass";
    case ReactiveErrorKind::NoSuchBaseMethod: return "NoSuchBaseMethod";
    case ReactiveErrorKind::RewriteError: return "RewriteError";
    case ReactiveErrorKind::MismatchedOutput: return "MismatchedOutput";
  }
  return "ReactiveError";
}

ReactiveError::ReactiveError(ReactiveErrorKind kind, const std::string& message)
    : Error(std::string(reactive_error_name(kind)) + ": " + message), kind_(kind) {}

}  // namespace rxl
