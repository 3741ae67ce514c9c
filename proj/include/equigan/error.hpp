#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace equigan {

enum class ErrorCode {
  // graph_core
  AsymmetricA,
  SelfLoop,
  NonBinaryA,
  NonOneHotRow,
  EdgeAttrMismatch,
  AsymmetricW,
  SizeMismatch,
  IndexOutOfRange,
  UnknownAtomType,
  InvalidDescriptor,
  // chem_io
  SyntaxError,
  UnknownElement,
  UnclosedRing,
  UnclosedBranch,
  ValenceOverflow,
  UnsupportedGraph,
  // autodiff
  ShapeMismatch,
  NonScalarRoot,
  TapeConsumed,
  ForeignTape,
  // gan_stages
  NEmpty,
  EmptyBatch,
  EmptyDataset,
  DivergedLoss,
  UntrainedStage,
  BadCheckpoint,
  BadConfig,
  // verify / metrics
  TooFewSamples,
  EmptyInput,
  // io
  IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace equigan
