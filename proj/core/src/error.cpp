#include "relkit/error.hpp"

namespace relkit {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::DuplicateSignature: return "DuplicateSignature";
    case ErrorKind::UnknownEntityType: return "UnknownEntityType";
    case ErrorKind::RoleOnProperty: return "RoleOnProperty";
    case ErrorKind::MultipleSelfRef: return "MultipleSelfRef";
    case ErrorKind::UnstratifiableProgram: return "UnstratifiableProgram";
    case ErrorKind::UsageError: return "UsageError";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::MixedPropertyKind: return "MixedPropertyKind";
    case ErrorKind::TypeMismatch: return "TypeMismatch";
    case ErrorKind::DanglingIdentifier: return "DanglingIdentifier";
    case ErrorKind::DuplicateEntity: return "DuplicateEntity";
    case ErrorKind::UnknownTarget: return "UnknownTarget";
    case ErrorKind::UnorderableKey: return "UnorderableKey";
    case ErrorKind::CaseNotInGraph: return "CaseNotInGraph";
    case ErrorKind::VertexNotFound: return "VertexNotFound";
    case ErrorKind::SignatureMismatch: return "SignatureMismatch";
    case ErrorKind::NoCases: return "NoCases";
    case ErrorKind::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorKind::LabelTaskMismatch: return "LabelTaskMismatch";
    case ErrorKind::DegenerateLabels: return "DegenerateLabels";
    case ErrorKind::ConfigMismatch: return "ConfigMismatch";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::Internal: return "Internal";
  }
  return "Unknown";
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SyntaxError:
    case ErrorKind::DuplicateSignature:
    case ErrorKind::UnknownEntityType:
    case ErrorKind::RoleOnProperty:
    case ErrorKind::MultipleSelfRef:
    case ErrorKind::UnstratifiableProgram:
    case ErrorKind::UsageError:
      return 1;
    case ErrorKind::IoError:
    case ErrorKind::Internal:
      return 3;
    default:
      return 2;
  }
}

std::string Error::format(ErrorKind kind, const std::string& message, int line,
                          int column) {
  std::string out = error_kind_name(kind);
  out += ": ";
  out += message;
  if (line > 0) {
    out += " at line " + std::to_string(line);
    if (column > 0) out += ", column " + std::to_string(column);
  }
  return out;
}

}  // namespace relkit
