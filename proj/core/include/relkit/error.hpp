#pragma once

#include <stdexcept>
#include <string>

namespace relkit {

enum class ErrorKind {
  // Domain / rule program errors (CLI exit code 1).
  SyntaxError,
  DuplicateSignature,
  UnknownEntityType,
  RoleOnProperty,
  MultipleSelfRef,
  UnstratifiableProgram,
  UsageError,

  // Data errors (CLI exit code 2).
  ParseError,
  ArityMismatch,
  MixedPropertyKind,
  TypeMismatch,
  DanglingIdentifier,
  DuplicateEntity,
  UnknownTarget,
  UnorderableKey,
  CaseNotInGraph,
  VertexNotFound,
  SignatureMismatch,
  NoCases,
  EmptyTrainingSet,
  LabelTaskMismatch,
  DegenerateLabels,
  ConfigMismatch,

  // Runtime errors (CLI exit code 3).
  IoError,
  Internal,
};

const char* error_kind_name(ErrorKind kind);

/// CLI exit code class for an error: 1 usage/parse, 2 data, 3 runtime.
int exit_code_for(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message, int line = 0, int column = 0)
      : std::runtime_error(format(kind, message, line, column)),
        kind_(kind),
        line_(line),
        column_(column) {}

  ErrorKind kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  static std::string format(ErrorKind kind, const std::string& message,
                            int line, int column);

  ErrorKind kind_;
  int line_;
  int column_;
};

}  // namespace relkit
