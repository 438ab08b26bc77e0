#pragma once

#include <stdexcept>
#include <string>

namespace hcf {

enum class Errc {
  DivisionByZero,
  AmbiguousRounding,
  BallContainsZero,
  OutsideFundamentalDomain,
  DegenerateFraction,
  PrecisionExhausted,
  NotAdmissible,
  MembershipUndecided,
  PreconditionViolated,
  BudgetExceeded,
  RateTooLarge,
  RateNotSmallO,
  Infeasible,
  AnnulusUnavailable,
  TauOutOfRange,
  WindowUnreachable,
  SearchExhausted,
  DepthExhausted,
  DegenerateScales,
  ParseError,
  InvalidArgument,
};

inline const char* errc_name(Errc e) {
  switch (e) {
    case Errc::DivisionByZero: return "DivisionByZero";
    case Errc::AmbiguousRounding: return "AmbiguousRounding";
    case Errc::BallContainsZero: return "BallContainsZero";
    case Errc::OutsideFundamentalDomain: return "OutsideFundamentalDomain";
    case Errc::DegenerateFraction: return "DegenerateFraction";
    case Errc::PrecisionExhausted: return "PrecisionExhausted";
    case Errc::NotAdmissible: return "NotAdmissible";
    case Errc::MembershipUndecided: return "MembershipUndecided";
    case Errc::PreconditionViolated: return "PreconditionViolated";
    case Errc::BudgetExceeded: return "BudgetExceeded";
    case Errc::RateTooLarge: return "RateTooLarge";
    case Errc::RateNotSmallO: return "RateNotSmallO";
    case Errc::Infeasible: return "Infeasible";
    case Errc::AnnulusUnavailable: return "AnnulusUnavailable";
    case Errc::TauOutOfRange: return "TauOutOfRange";
    case Errc::WindowUnreachable: return "WindowUnreachable";
    case Errc::SearchExhausted: return "SearchExhausted";
    case Errc::DepthExhausted: return "DepthExhausted";
    case Errc::DegenerateScales: return "DegenerateScales";
    case Errc::ParseError: return "ParseError";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace hcf
