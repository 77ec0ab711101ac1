#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qhelly {

inline constexpr std::string_view kVersion = "qhelly 0.1.0";

// Hard caps for the brute-force combinatorial primitives.
inline constexpr int kMaxDim = 8;
inline constexpr int kMaxFacets = 64;
inline constexpr int kMaxOracleFacets = 12;

// Every geometric tolerance used by the library lives here.
struct Tolerances {
  double incidence = 1e-9;       // point-on-hyperplane test
  double dedupe = 1e-9;          // merge points closer than this
  double spd_floor = 1e-12;      // minimum eigenvalue of an ellipsoid shape
  double zero_normal = 1e-14;    // |a| below this is rejected
  double degenerate_radius = 1e-10;
  double contact = 1e-7;         // b_i <= 1 + contact marks a contact point
  double solver_gap = 1e-9;      // log-volume suboptimality of the ellipsoid solver
  double feasibility = 1e-8;     // re-check of the returned ellipsoid
  double decomposition = 1e-6;   // residual of John's identity
  double weight_floor = 1e-10;   // NNLS weights below this are dropped
  double lp_pivot = 1e-11;
  int newton_cap = 500;
  long long enumeration_cap = 20'000'000;  // d-subsets examined by vertex enumeration

  // Checker tolerances are producer tolerances scaled up (default 10x).
  [[nodiscard]] Tolerances scaled(double factor) const {
    Tolerances t = *this;
    t.incidence *= factor;
    t.dedupe *= factor;
    t.contact *= factor;
    t.feasibility *= factor;
    t.decomposition *= factor;
    return t;
  }
};

enum class ErrorKind {
  ZeroNormal,
  ZeroPoint,
  Unbounded,
  Empty,
  Degenerate,
  DegenerateSimplex,
  NotCentered,
  NoConvergence,
  TooFewContacts,
  NoDecomposition,
  NumericalBreakdown,
  ReductionFailed,
  Misaligned,
  SubfamilyTooLarge,
  MalformedCertificate,
  MalformedInput,
  CapExceeded,
  Infeasible,
};

inline std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::ZeroNormal: return "ZeroNormal";
    case ErrorKind::ZeroPoint: return "ZeroPoint";
    case ErrorKind::Unbounded: return "Unbounded";
    case ErrorKind::Empty: return "Empty";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::DegenerateSimplex: return "DegenerateSimplex";
    case ErrorKind::NotCentered: return "NotCentered";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::TooFewContacts: return "TooFewContacts";
    case ErrorKind::NoDecomposition: return "NoDecomposition";
    case ErrorKind::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorKind::ReductionFailed: return "ReductionFailed";
    case ErrorKind::Misaligned: return "Misaligned";
    case ErrorKind::SubfamilyTooLarge: return "SubfamilyTooLarge";
    case ErrorKind::MalformedCertificate: return "MalformedCertificate";
    case ErrorKind::MalformedInput: return "MalformedInput";
    case ErrorKind::CapExceeded: return "CapExceeded";
    case ErrorKind::Infeasible: return "Infeasible";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised by the end-to-end pipeline; names the stage that failed.
class PipelineError : public Error {
 public:
  PipelineError(std::string stage, const Error& cause)
      : Error(cause.kind(), "stage '" + stage + "': " + cause.what()), stage_(std::move(stage)) {}

  [[nodiscard]] const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace qhelly
