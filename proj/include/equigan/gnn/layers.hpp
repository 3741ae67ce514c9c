#pragma once

#include <string>
#include <vector>

#include "equigan/gnn/params.hpp"

namespace equigan::gnn {

using ad::Index;
using ad::IndexList;

inline constexpr double kCeluAlpha = 1.0;

/// Affine map x W + b; weight is in x out, bias is 1 x out.
struct Linear {
  Tensor weight;
  Tensor bias;

  static Linear bind(const Binding& params, const std::string& prefix);
  Index in() const { return weight.rows(); }
  Index out() const { return weight.cols(); }
};

Tensor apply(const Linear& f, const Tensor& x);

/// Feed-forward stack with CELU between layers. Zero layers is the identity.
struct Mlp {
  std::vector<Linear> layers;

  static Mlp bind(const Binding& params, const std::string& prefix, int depth);
};

Tensor apply(const Mlp& f, const Tensor& x);
void init_mlp(ParameterStore& store, const std::string& prefix, const std::vector<int>& widths, std::mt19937_64& rng);

/// Row layout for B graphs of n nodes each. Node rows are b*n + i, pair rows
/// are b*n*n + i*n + j.
class BatchTopology {
 public:
  BatchTopology(int batch, int n);

  int batch() const { return batch_; }
  int n() const { return n_; }
  Index nodes() const { return static_cast<Index>(batch_) * n_; }
  Index pairs() const { return static_cast<Index>(batch_) * n_ * n_; }

  /// Global node row of the source i of each pair row.
  const IndexList& source() const { return source_; }
  /// Global node row of the target j of each pair row.
  const IndexList& target() const { return target_; }
  /// Pair row of (j, i) for each pair row (i, j).
  const IndexList& transpose() const { return transpose_; }
  /// Graph index of each node row.
  const IndexList& graph_of_node() const { return graph_of_node_; }
  /// 1 off the diagonal, 0 on it; pairs x 1.
  const Tensor& off_diagonal() const { return off_diagonal_; }

 private:
  int batch_;
  int n_;
  IndexList source_;
  IndexList target_;
  IndexList transpose_;
  IndexList graph_of_node_;
  Tensor off_diagonal_;
};

/// Flattens B adjacency matrices (each n x n) into a pairs x 1 column.
Matrix adjacency_column(const std::vector<Matrix>& adjacency);

struct LayerWidths {
  int node_in;
  int edge_in;
  int node_out;
  int edge_out;
};

/// f_r' : 2 node_in -> edge_out, f_r : edge_in + edge_out -> edge_out,
/// f_h : node_in + edge_out -> node_out.
struct LayerParams {
  Linear edge_pair;
  Linear edge_update;
  Linear node_update;

  static LayerParams bind(const Binding& params, const std::string& prefix);
};

void init_layer(ParameterStore& store, const std::string& prefix, const LayerWidths& widths, std::mt19937_64& rng);

struct NodeEdgeState {
  Tensor H;  // nodes x d_h
  Tensor R;  // pairs x d_r
};

/// One message-passing update:
///   r'_ij = mean of f_r'([h_i, h_j]) and f_r'([h_j, h_i])
///   r_ij  = f_r([r_ij, r'_ij])
///   h_i   = celu(f_h([h_i, sum_{j : A_ij = 1} r_ij]))
/// The neighbour sum runs over ascending j. `adjacency` is a pairs x 1
/// column and may carry gradients.
NodeEdgeState interaction_layer(const NodeEdgeState& state, const Tensor& adjacency, const BatchTopology& topo,
                                const LayerParams& params);

/// Single-graph convenience form with an n x n skeleton.
NodeEdgeState interaction_layer(const NodeEdgeState& state, const Matrix& adjacency, const LayerParams& params);

/// Whether the pair network sees (z_i, z_j) or only z_j.
enum class PairForm { Literal, Classic };

struct DeepSetsParams {
  Linear pair;     // h(z_i, z_j; psi)
  Linear combine;  // g(z_i, s; phi)
  PairForm form = PairForm::Literal;
  bool pair_activation = true;
  bool combine_activation = false;

  static DeepSetsParams bind(const Binding& params, const std::string& prefix);
};

/// out_i = g([z_i, sum_{j != i} h([z_i, z_j])]).
Tensor deepsets_pair_layer(const Tensor& Z, const DeepSetsParams& params, const BatchTopology& topo);
Tensor deepsets_pair_layer(const Tensor& Z, const DeepSetsParams& params);

/// Symmetric pair scores s_ij = u(m(z_i, z_j) + m(z_j, z_i)) with m the pair
/// network; returns a pairs x 1 column of logits, exactly symmetric.
Tensor deepsets_pair_scores(const Tensor& Z, const DeepSetsParams& params, const Linear& score,
                            const BatchTopology& topo);

/// head(sum_i h_i) per graph; returns batch x d_out.
Tensor invariant_readout(const Tensor& H, const Mlp& head, const BatchTopology& topo);
Tensor invariant_readout(const Tensor& H, const Mlp& head);

}  // namespace equigan::gnn
