#include "equigan/error.hpp"

namespace equigan {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::AsymmetricA: return "AsymmetricA";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::NonBinaryA: return "NonBinaryA";
    case ErrorCode::NonOneHotRow: return "NonOneHotRow";
    case ErrorCode::EdgeAttrMismatch: return "EdgeAttrMismatch";
    case ErrorCode::AsymmetricW: return "AsymmetricW";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::UnknownAtomType: return "UnknownAtomType";
    case ErrorCode::InvalidDescriptor: return "InvalidDescriptor";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownElement: return "UnknownElement";
    case ErrorCode::UnclosedRing: return "UnclosedRing";
    case ErrorCode::UnclosedBranch: return "UnclosedBranch";
    case ErrorCode::ValenceOverflow: return "ValenceOverflow";
    case ErrorCode::UnsupportedGraph: return "UnsupportedGraph";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonScalarRoot: return "NonScalarRoot";
    case ErrorCode::TapeConsumed: return "TapeConsumed";
    case ErrorCode::ForeignTape: return "ForeignTape";
    case ErrorCode::NEmpty: return "NEmpty";
    case ErrorCode::EmptyBatch: return "EmptyBatch";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::DivergedLoss: return "DivergedLoss";
    case ErrorCode::UntrainedStage: return "UntrainedStage";
    case ErrorCode::BadCheckpoint: return "BadCheckpoint";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace equigan
