#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pcafe {

// Every failure raised by the engine carries one of these codes. The CLI and
// the HTTP service map them onto exit codes and status codes respectively.
enum class Errc {
  // matrix construction
  MissingPair,
  DuplicatePair,
  OutOfScale,
  DimensionMismatch,
  EmptyPanel,
  // numerics
  ZeroWeight,
  ZeroEntry,
  NoRIAvailable,
  TooSmall,
  ThetaTooSmall,
  // evaluation
  CountMismatch,
  MissingWeights,
  MissingLeaf,
  ArityMismatch,
  // structure
  InvalidHierarchy,
  InvalidEvaluationSet,
  InvalidArgument,
  // sessions
  Malformed,
  SchemaViolation,
  ScaleMismatch,
  IncompleteJudgments,
  MissingRating,
  UnknownNode,
  UnknownSession,
  UnknownExpert,
  DuplicateExpert,
  BadGrade,
  NoBanding,
  ConsistencyFailure,
  Io,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::MissingPair: return "MissingPair";
    case Errc::DuplicatePair: return "DuplicatePair";
    case Errc::OutOfScale: return "OutOfScale";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::EmptyPanel: return "EmptyPanel";
    case Errc::ZeroWeight: return "ZeroWeight";
    case Errc::ZeroEntry: return "ZeroEntry";
    case Errc::NoRIAvailable: return "NoRIAvailable";
    case Errc::TooSmall: return "TooSmall";
    case Errc::ThetaTooSmall: return "ThetaTooSmall";
    case Errc::CountMismatch: return "CountMismatch";
    case Errc::MissingWeights: return "MissingWeights";
    case Errc::MissingLeaf: return "MissingLeaf";
    case Errc::ArityMismatch: return "ArityMismatch";
    case Errc::InvalidHierarchy: return "InvalidHierarchy";
    case Errc::InvalidEvaluationSet: return "InvalidEvaluationSet";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Malformed: return "Malformed";
    case Errc::SchemaViolation: return "SchemaViolation";
    case Errc::ScaleMismatch: return "ScaleMismatch";
    case Errc::IncompleteJudgments: return "IncompleteJudgments";
    case Errc::MissingRating: return "MissingRating";
    case Errc::UnknownNode: return "UnknownNode";
    case Errc::UnknownSession: return "UnknownSession";
    case Errc::UnknownExpert: return "UnknownExpert";
    case Errc::DuplicateExpert: return "DuplicateExpert";
    case Errc::BadGrade: return "BadGrade";
    case Errc::NoBanding: return "NoBanding";
    case Errc::ConsistencyFailure: return "ConsistencyFailure";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  Errc code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

#define PCAFE_REQUIRE(cond, code, detail)      \
  do {                                         \
    if (!(cond)) throw ::pcafe::Error((code), (detail)); \
  } while (0)

}  // namespace pcafe
