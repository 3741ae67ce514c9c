#pragma once

#include <vector>

#include "equigan/gan/models.hpp"

namespace equigan::gan {

enum class SkeletonSource { Data, Stage1 };

struct StageModel {
  StageConfig config;
  ModelParams params;
};

struct GenerateOptions {
  /// Categorical draws instead of argmax.
  bool sample = false;
  /// Reuse the stage-2 latent set for stage 3.
  bool shared_z = false;
};

struct GenerateInputs {
  SkeletonSource source = SkeletonSource::Data;
  /// Skeletons to draw from (source Data).
  std::vector<Matrix> skeletons;
  /// Node counts to draw n from (source Stage1).
  std::vector<int> node_counts;
  const StageModel* stage1 = nullptr;
  const StageModel* stage2 = nullptr;
  const StageModel* stage3 = nullptr;
  std::shared_ptr<const AtomVocab> vocab;
};

/// Draws A, then X from stage 2, then W from stage 3, one molecule at a time.
/// Throws UntrainedStage when a required stage is missing.
std::vector<MolecularGraph> generate(std::size_t count, const GenerateInputs& inputs, Rng& rng,
                                     const GenerateOptions& options = {});

/// Skeleton column from stage 1 for a single graph of n nodes.
Matrix generate_skeleton(const StageModel& stage1, int n, Rng& rng, bool sample = false);

}  // namespace equigan::gan
