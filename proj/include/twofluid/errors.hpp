#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace twofluid {

/// Bad configuration or input data (case file, primitive state, scheme constants).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class NumericalErrorKind {
  NoAdmissibleRoot,
  TwoAdmissibleRoots,
  ClosureInconsistency,
  SoundSpeed,
  CflViolation,
  DiffusionStability,
  SingularBand,
  Vacuum,
  NonFinite,
  BoundaryContamination,
};

inline const char* to_string(NumericalErrorKind kind) {
  switch (kind) {
    case NumericalErrorKind::NoAdmissibleRoot: return "NoAdmissibleRoot";
    case NumericalErrorKind::TwoAdmissibleRoots: return "TwoAdmissibleRoots";
    case NumericalErrorKind::ClosureInconsistency: return "ClosureInconsistency";
    case NumericalErrorKind::SoundSpeed: return "SoundSpeedError";
    case NumericalErrorKind::CflViolation: return "CflViolation";
    case NumericalErrorKind::DiffusionStability: return "DiffusionStability";
    case NumericalErrorKind::SingularBand: return "SingularBand";
    case NumericalErrorKind::Vacuum: return "Vacuum";
    case NumericalErrorKind::NonFinite: return "NonFinite";
    case NumericalErrorKind::BoundaryContamination: return "BoundaryContamination";
  }
  return "Unknown";
}

/// A scheme or closure abort. Cell and step are attached as the error
/// propagates outward through the field loops and the time loop.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(NumericalErrorKind kind, std::string detail)
      : std::runtime_error(detail), kind_(kind), detail_(std::move(detail)) {}

  NumericalErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }
  std::optional<std::size_t> cell() const noexcept { return cell_; }
  std::optional<std::size_t> step() const noexcept { return step_; }

  NumericalError with_cell(std::size_t cell) const {
    NumericalError e = *this;
    if (!e.cell_) e.cell_ = cell;
    return e;
  }
  NumericalError with_step(std::size_t step) const {
    NumericalError e = *this;
    if (!e.step_) e.step_ = step;
    return e;
  }

  std::string describe() const {
    std::string s = to_string(kind_);
    if (step_) s += " at step " + std::to_string(*step_);
    if (cell_) s += (step_ ? ", cell " : " at cell ") + std::to_string(*cell_);
    s += ": " + detail_;
    return s;
  }

 private:
  NumericalErrorKind kind_;
  std::string detail_;
  std::optional<std::size_t> cell_;
  std::optional<std::size_t> step_;
};

}  // namespace twofluid
