#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace domes {

enum class ErrorKind {
  Separated,
  Coincident,
  Degenerate,
  DegenerateLine,
  NonIntegerEdge,
  InvalidCurve,
  NotOnPivotCircle,
  BudgetExceeded,
  NotClosed,
  SearchFailed,
  FixBudgetExceeded,
  ComponentTooShort,
  NotBoundaryEdge,
  NotInTriangle,
  InvalidSurface,
  ReplayMismatch,
  PositioningViolated,
  UnknownName,
  ProjectionDiverged,
  NotOrientable,
  BoundaryShapeMismatch,
  Disconnected,
  Parse,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Separated: return "Separated";
    case ErrorKind::Coincident: return "Coincident";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::DegenerateLine: return "DegenerateLine";
    case ErrorKind::NonIntegerEdge: return "NonIntegerEdge";
    case ErrorKind::InvalidCurve: return "InvalidCurve";
    case ErrorKind::NotOnPivotCircle: return "NotOnPivotCircle";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::NotClosed: return "NotClosed";
    case ErrorKind::SearchFailed: return "SearchFailed";
    case ErrorKind::FixBudgetExceeded: return "FixBudgetExceeded";
    case ErrorKind::ComponentTooShort: return "ComponentTooShort";
    case ErrorKind::NotBoundaryEdge: return "NotBoundaryEdge";
    case ErrorKind::NotInTriangle: return "NotInTriangle";
    case ErrorKind::InvalidSurface: return "InvalidSurface";
    case ErrorKind::ReplayMismatch: return "ReplayMismatch";
    case ErrorKind::PositioningViolated: return "PositioningViolated";
    case ErrorKind::UnknownName: return "UnknownName";
    case ErrorKind::ProjectionDiverged: return "ProjectionDiverged";
    case ErrorKind::NotOrientable: return "NotOrientable";
    case ErrorKind::BoundaryShapeMismatch: return "BoundaryShapeMismatch";
    case ErrorKind::Disconnected: return "Disconnected";
    case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

/// Exception carrying a machine-checkable kind alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace domes
