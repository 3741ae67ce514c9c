#pragma once

#include <vector>

#include "equigan/gan/config.hpp"
#include "equigan/graph.hpp"
#include "equigan/gnn/layers.hpp"

namespace equigan::gan {

using ad::Matrix;
using ad::Tensor;
using gnn::BatchTopology;
using gnn::Binding;
using gnn::ParameterStore;

/// Generator and discriminator weights of one stage.
struct ModelParams {
  StageId stage = StageId::NodeAttrs;
  ParameterStore generator;
  ParameterStore discriminator;

  bool operator==(const ModelParams&) const = default;
};

/// Fresh weights for `config.stage`; `vocab_size` sets the node-attribute width.
ModelParams init_model(const StageConfig& config, int vocab_size, Rng& rng);

/// n x width matrix of iid standard normal draws. Throws NEmpty for n < 1.
Matrix sample_latent(int n, int width, Rng& rng);

/// How categorical outputs are discretized during training.
struct Relaxation {
  double tau = 1.0;
  /// Gumbel (or logistic, for binary outputs) noise source; null for none.
  Rng* noise = nullptr;
  /// Forward value is the hard one-hot with straight-through gradients when
  /// set, otherwise the relaxed probabilities themselves.
  bool straight_through = true;
};

struct StageOutput {
  /// Generator logits: pairs x 1 (stage 1), nodes x k (stage 2), pairs x 4 (stage 3).
  Tensor logits;
  /// Relaxed or straight-through sample in the data encoding of the stage.
  Tensor sample;
};

// Batched forward passes. Inputs follow BatchTopology's row layout: node rows
// b*n+i, pair rows b*n*n+i*n+j. A is a pairs x 1 column.

StageOutput stage1_generator(const Binding& g, const StageConfig& config, const Tensor& Z, const BatchTopology& topo,
                             const Relaxation& relax);
StageOutput stage2_generator(const Binding& g, const StageConfig& config, const Tensor& Z, const Tensor& A,
                             const BatchTopology& topo, const Relaxation& relax);
StageOutput stage3_generator(const Binding& g, const StageConfig& config, const Tensor& Z, const Tensor& X,
                             const Tensor& A, const BatchTopology& topo, const Relaxation& relax);

/// Critic scores, batch x 1.
Tensor stage1_discriminator(const Binding& d, const StageConfig& config, const Tensor& A, const BatchTopology& topo);
Tensor stage2_discriminator(const Binding& d, const StageConfig& config, const Tensor& X, const Tensor& A,
                            const BatchTopology& topo);
Tensor stage3_discriminator(const Binding& d, const StageConfig& config, const Tensor& W, const Tensor& X,
                            const Tensor& A, const BatchTopology& topo);

/// Edge probabilities of stage 1, pairs x 1: sigmoid of the logits with a zero diagonal.
Matrix edge_probabilities(const Matrix& logits, const BatchTopology& topo);
/// Row-wise softmax probabilities, zeroed on rows where `mask` is 0 (if given).
Matrix categorical_probabilities(const Matrix& logits, const Matrix* mask = nullptr);

/// Discretization used at generation time.
/// One-hot of the row argmax (lowest index on ties); rows with mask 0 stay zero.
Matrix argmax_one_hot(const Matrix& scores, const Matrix* mask = nullptr);
/// Categorical draw per row from the softmax of `logits`. With `topo`, rows
/// (i,j) and (j,i) share a draw.
Matrix sample_one_hot(const Matrix& logits, Rng& rng, const Matrix* mask = nullptr,
                      const BatchTopology* topo = nullptr);
/// Binary skeleton column: logit > 0 (argmax) or a symmetric Bernoulli draw.
Matrix threshold_edges(const Matrix& logits, const BatchTopology& topo, Rng* sample = nullptr);

/// Counts generator forward passes per stage on this thread (instrumentation
/// for teacher forcing).
struct GeneratorCalls {
  long skeleton = 0;
  long node = 0;
  long edge = 0;
};
GeneratorCalls& generator_calls();

}  // namespace equigan::gan
