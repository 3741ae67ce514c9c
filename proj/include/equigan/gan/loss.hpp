#pragma once

#include <vector>

#include "equigan/gan/models.hpp"

namespace equigan::gan {

/// Data tensors of `size` graphs that share node count n, in BatchTopology layout.
struct Batch {
  int n = 0;
  int size = 0;
  Matrix A;  // pairs x 1
  Matrix X;  // nodes x k
  Matrix W;  // pairs x 4
};

/// Throws EmptyBatch for no graphs and SizeMismatch for mixed node counts.
Batch make_batch(const std::vector<const MolecularGraph*>& graphs);

/// The stage's generated variable in the data: A, X or W.
const Matrix& data_variable(StageId stage, const Batch& batch);

/// Critic scores of `generated` (A, X or W) with the remaining inputs taken
/// from `conditioning`: d(A), d(X, A), d(W, X, A).
Tensor critic(StageId stage, const Binding& d, const StageConfig& config, const Tensor& generated,
              const Batch& conditioning, const BatchTopology& topo);

struct StageLoss {
  /// V = E[-d(real)] + E[d(fake)]; the critic maximizes it.
  Tensor value;
  /// -V, plus gp_weight * penalty when a penalty was requested.
  Tensor d_loss;
  /// E[d(fake)]; the generator minimizes it.
  Tensor g_loss;
  Tensor penalty;
};

struct PenaltyInput {
  /// Per-graph interpolation weights in [0, 1], batch x 1.
  Matrix epsilon;
  ad::Tape* tape = nullptr;
};

/// E[(||grad_x d(x~)|| - 1)^2] over x~ = eps * real + (1 - eps) * fake, with
/// the norm taken per graph. Differentiable in the critic weights.
Tensor gradient_penalty(StageId stage, const Batch& real, const Matrix& fake, const Binding& d,
                        const StageConfig& config, const BatchTopology& topo, const PenaltyInput& input);

StageLoss wgan_stage_loss(StageId stage, const Batch& real, const Tensor& fake, const Binding& d,
                          const StageConfig& config, const BatchTopology& topo,
                          const PenaltyInput* penalty = nullptr);

}  // namespace equigan::gan
