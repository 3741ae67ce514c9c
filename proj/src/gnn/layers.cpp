#include "equigan/gnn/layers.hpp"

namespace equigan::gnn {

using namespace ad;

Linear Linear::bind(const Binding& params, const std::string& prefix) {
  return Linear{params[prefix + ".weight"], params[prefix + ".bias"]};
}

Tensor apply(const Linear& f, const Tensor& x) { return add(matmul(x, f.weight), f.bias); }

Mlp Mlp::bind(const Binding& params, const std::string& prefix, int depth) {
  Mlp m;
  for (int l = 0; l < depth; ++l) m.layers.push_back(Linear::bind(params, prefix + "." + std::to_string(l)));
  return m;
}

Tensor apply(const Mlp& f, const Tensor& x) {
  Tensor h = x;
  for (std::size_t l = 0; l < f.layers.size(); ++l) {
    h = apply(f.layers[l], h);
    if (l + 1 < f.layers.size()) h = celu(h, kCeluAlpha);
  }
  return h;
}

void init_mlp(ParameterStore& store, const std::string& prefix, const std::vector<int>& widths,
              std::mt19937_64& rng) {
  for (std::size_t l = 0; l + 1 < widths.size(); ++l)
    init_linear(store, prefix + "." + std::to_string(l), widths[l], widths[l + 1], rng);
}

// ---------------------------------------------------------------------------

BatchTopology::BatchTopology(int batch, int n) : batch_(batch), n_(n) {
  if (batch < 1 || n < 1) throw Error(ErrorCode::NEmpty, "topology needs at least one graph and one node");
  std::vector<Index> src, tgt, tr, graph;
  const Index nn = static_cast<Index>(n) * n;
  src.reserve(static_cast<std::size_t>(pairs()));
  tgt.reserve(static_cast<std::size_t>(pairs()));
  tr.reserve(static_cast<std::size_t>(pairs()));
  Matrix off(pairs(), 1);
  for (int b = 0; b < batch; ++b) {
    const Index base = static_cast<Index>(b) * n;
    for (int i = 0; i < n; ++i) {
      graph.push_back(b);
      for (int j = 0; j < n; ++j) {
        src.push_back(base + i);
        tgt.push_back(base + j);
        tr.push_back(b * nn + static_cast<Index>(j) * n + i);
        off(b * nn + static_cast<Index>(i) * n + j, 0) = i == j ? 0.0 : 1.0;
      }
    }
  }
  source_ = make_index(std::move(src));
  target_ = make_index(std::move(tgt));
  transpose_ = make_index(std::move(tr));
  graph_of_node_ = make_index(std::move(graph));
  off_diagonal_ = Tensor(std::move(off));
}

Matrix adjacency_column(const std::vector<Matrix>& adjacency) {
  if (adjacency.empty()) throw Error(ErrorCode::EmptyBatch, "no adjacency matrices");
  const Index n = adjacency.front().rows();
  Matrix col(static_cast<Index>(adjacency.size()) * n * n, 1);
  Index row = 0;
  for (const auto& a : adjacency) {
    if (a.rows() != n || a.cols() != n) throw Error(ErrorCode::ShapeMismatch, "adjacency batch with mixed sizes");
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) col(row++, 0) = a(i, j);
  }
  return col;
}

// ---------------------------------------------------------------------------

LayerParams LayerParams::bind(const Binding& params, const std::string& prefix) {
  return LayerParams{Linear::bind(params, prefix + ".edge_pair"), Linear::bind(params, prefix + ".edge_update"),
                     Linear::bind(params, prefix + ".node_update")};
}

void init_layer(ParameterStore& store, const std::string& prefix, const LayerWidths& w, std::mt19937_64& rng) {
  init_linear(store, prefix + ".edge_pair", 2 * w.node_in, w.edge_out, rng);
  init_linear(store, prefix + ".edge_update", w.edge_in + w.edge_out, w.edge_out, rng);
  init_linear(store, prefix + ".node_update", w.node_in + w.edge_out, w.node_out, rng);
}

NodeEdgeState interaction_layer(const NodeEdgeState& state, const Tensor& adjacency, const BatchTopology& topo,
                                const LayerParams& p) {
  const Index d_h = state.H.cols();
  if (state.H.rows() != topo.nodes() || state.R.rows() != topo.pairs() || adjacency.rows() != topo.pairs() ||
      adjacency.cols() != 1)
    throw Error(ErrorCode::ShapeMismatch, "interaction_layer: H " + state.H.shape() + ", R " + state.R.shape() +
                                              ", A " + adjacency.shape() + " for " + std::to_string(topo.batch()) +
                                              " graphs of " + std::to_string(topo.n()) + " nodes");
  if (p.edge_pair.in() != 2 * d_h || p.edge_update.in() != state.R.cols() + p.edge_pair.out() ||
      p.node_update.in() != d_h + p.edge_update.out())
    throw Error(ErrorCode::ShapeMismatch, "interaction_layer: parameter widths do not chain");

  // f_r' on [h_i, h_j] splits into h_i W_top + h_j W_bottom.
  Tensor top = matmul(state.H, slice_rows(p.edge_pair.weight, 0, d_h));
  Tensor bottom = matmul(state.H, slice_rows(p.edge_pair.weight, d_h, d_h));
  Tensor forward = add(gather_rows(top, topo.source()), gather_rows(bottom, topo.target()));
  Tensor backward = add(gather_rows(top, topo.target()), gather_rows(bottom, topo.source()));
  Tensor pair = add(scale(add(forward, backward), 0.5), p.edge_pair.bias);

  Tensor edges = apply(p.edge_update, concat_cols({state.R, pair}));
  Tensor messages = scatter_add_rows(mul(edges, adjacency), topo.source(), topo.nodes());
  Tensor nodes = celu(apply(p.node_update, concat_cols({state.H, messages})), kCeluAlpha);
  return NodeEdgeState{nodes, edges};
}

NodeEdgeState interaction_layer(const NodeEdgeState& state, const Matrix& adjacency, const LayerParams& params) {
  BatchTopology topo(1, static_cast<int>(adjacency.rows()));
  return interaction_layer(state, Tensor(adjacency_column({adjacency})), topo, params);
}

// ---------------------------------------------------------------------------

DeepSetsParams DeepSetsParams::bind(const Binding& params, const std::string& prefix) {
  DeepSetsParams p;
  p.pair = Linear::bind(params, prefix + ".pair");
  p.combine = Linear::bind(params, prefix + ".combine");
  return p;
}

namespace {

Tensor pair_messages(const Tensor& Z, const DeepSetsParams& params, const BatchTopology& topo) {
  if (Z.rows() != topo.nodes()) throw Error(ErrorCode::ShapeMismatch, "deepsets: Z " + Z.shape());
  const Index expected = params.form == PairForm::Literal ? 2 * Z.cols() : Z.cols();
  if (params.pair.in() != expected)
    throw Error(ErrorCode::ShapeMismatch, "deepsets: pair network expects " + std::to_string(params.pair.in()) +
                                              " inputs, got " + std::to_string(expected));
  Tensor inputs = params.form == PairForm::Literal
                      ? concat_cols({gather_rows(Z, topo.source()), gather_rows(Z, topo.target())})
                      : gather_rows(Z, topo.target());
  Tensor m = apply(params.pair, inputs);
  return params.pair_activation ? celu(m, kCeluAlpha) : m;
}

}  // namespace

Tensor deepsets_pair_layer(const Tensor& Z, const DeepSetsParams& params, const BatchTopology& topo) {
  Tensor m = pair_messages(Z, params, topo);
  Tensor pooled = scatter_add_rows(mul(m, topo.off_diagonal()), topo.source(), topo.nodes());
  if (params.combine.in() != Z.cols() + pooled.cols())
    throw Error(ErrorCode::ShapeMismatch, "deepsets: combine network width mismatch");
  Tensor out = apply(params.combine, concat_cols({Z, pooled}));
  return params.combine_activation ? celu(out, kCeluAlpha) : out;
}

Tensor deepsets_pair_layer(const Tensor& Z, const DeepSetsParams& params) {
  if (Z.rows() < 1) throw Error(ErrorCode::NEmpty, "deepsets on an empty set");
  return deepsets_pair_layer(Z, params, BatchTopology(1, static_cast<int>(Z.rows())));
}

Tensor deepsets_pair_scores(const Tensor& Z, const DeepSetsParams& params, const Linear& score,
                            const BatchTopology& topo) {
  Tensor m = pair_messages(Z, params, topo);
  Tensor both = add(m, gather_rows(m, topo.transpose()));
  Tensor s = apply(score, both);
  if (s.cols() != 1) throw Error(ErrorCode::ShapeMismatch, "pair score must be scalar per pair");
  // Row (i,j) and (j,i) hold identical inputs; averaging with the transpose
  // makes the result bit-symmetric regardless of GEMM row blocking.
  return scale(add(s, gather_rows(s, topo.transpose())), 0.5);
}

Tensor invariant_readout(const Tensor& H, const Mlp& head, const BatchTopology& topo) {
  if (H.rows() != topo.nodes()) throw Error(ErrorCode::ShapeMismatch, "readout: H " + H.shape());
  Tensor pooled = scatter_add_rows(H, topo.graph_of_node(), topo.batch());
  return apply(head, pooled);
}

Tensor invariant_readout(const Tensor& H, const Mlp& head) {
  if (H.rows() < 1) throw Error(ErrorCode::NEmpty, "readout of an empty graph");
  return invariant_readout(H, head, BatchTopology(1, static_cast<int>(H.rows())));
}

}  // namespace equigan::gnn
