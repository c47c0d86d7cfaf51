#pragma once

#include <stdexcept>
#include <string>

namespace sphirf {

/// Invalid arguments, malformed inputs and domain violations.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Failures of the numerical machinery on otherwise well-formed input.
class NumericalError : public std::runtime_error {
public:
  enum class Kind {
    TooFewSites,
    RankDeficientDesign,
    SingularSystem,
    DuplicateSites,
    NonUnisolvent,
    NotAllowable,
    QuadratureTooCoarse,
  };

  NumericalError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

private:
  Kind kind_;
};

inline const char* to_string(NumericalError::Kind kind) {
  switch (kind) {
  case NumericalError::Kind::TooFewSites: return "TooFewSites";
  case NumericalError::Kind::RankDeficientDesign: return "RankDeficientDesign";
  case NumericalError::Kind::SingularSystem: return "SingularSystem";
  case NumericalError::Kind::DuplicateSites: return "DuplicateSites";
  case NumericalError::Kind::NonUnisolvent: return "NonUnisolvent";
  case NumericalError::Kind::NotAllowable: return "NotAllowable";
  case NumericalError::Kind::QuadratureTooCoarse: return "QuadratureTooCoarse";
  }
  return "Unknown";
}

} // namespace sphirf
