#pragma once

#include <stdexcept>
#include <string>

namespace gdp {

// Every failure mode the library reports deliberately. Codes are stable API:
// tests and the CLI error records match on them, not on message text.
enum class Errc {
  CycleDetected,
  SelfLoop,
  DuplicateEdge,
  NodeOutOfRange,
  NonGradedDag,
  UnreachableNode,
  GenerationOutOfRange,
  RootHasNoChain,
  DimensionMismatch,
  CholeskyFailure,
  ZeroConcentration,
  AdaptAfterFreeze,
  AllZeroMass,
  ConfigMismatch,
  EmptySamples,
  LengthMismatch,
  DegenerateClustering,
  KTooLarge,
  UnknownScenario,
  IoFailure,
  SchemaMismatch,
  EmptyChains,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::CycleDetected: return "CycleDetected";
    case Errc::SelfLoop: return "SelfLoop";
    case Errc::DuplicateEdge: return "DuplicateEdge";
    case Errc::NodeOutOfRange: return "NodeOutOfRange";
    case Errc::NonGradedDag: return "NonGradedDag";
    case Errc::UnreachableNode: return "UnreachableNode";
    case Errc::GenerationOutOfRange: return "GenerationOutOfRange";
    case Errc::RootHasNoChain: return "RootHasNoChain";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::CholeskyFailure: return "CholeskyFailure";
    case Errc::ZeroConcentration: return "ZeroConcentration";
    case Errc::AdaptAfterFreeze: return "AdaptAfterFreeze";
    case Errc::AllZeroMass: return "AllZeroMass";
    case Errc::ConfigMismatch: return "ConfigMismatch";
    case Errc::EmptySamples: return "EmptySamples";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::DegenerateClustering: return "DegenerateClustering";
    case Errc::KTooLarge: return "KTooLarge";
    case Errc::UnknownScenario: return "UnknownScenario";
    case Errc::IoFailure: return "IoFailure";
    case Errc::SchemaMismatch: return "SchemaMismatch";
    case Errc::EmptyChains: return "EmptyChains";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw Error(code, std::string(errc_name(code)) + ": " + what);
}

}  // namespace gdp
