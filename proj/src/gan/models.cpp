#include "equigan/gan/models.hpp"

#include <cmath>
#include <limits>

namespace equigan::gan {

using namespace ad;
using gnn::LayerParams;
using gnn::LayerWidths;
using gnn::Linear;
using gnn::Mlp;
using gnn::NodeEdgeState;

namespace {

std::string layer_name(int l) { return "layer" + std::to_string(l); }

void init_trunk(ParameterStore& store, const StageConfig& c, int node_in, int edge_in, Rng& rng) {
  for (int l = 0; l < c.layers; ++l) {
    const LayerWidths w{l == 0 ? node_in : c.node_width, l == 0 ? edge_in : c.edge_width, c.node_width, c.edge_width};
    gnn::init_layer(store, layer_name(l), w, rng);
  }
}

NodeEdgeState run_trunk(const Binding& p, const StageConfig& c, NodeEdgeState state, const Tensor& A,
                        const BatchTopology& topo) {
  for (int l = 0; l < c.layers; ++l)
    state = gnn::interaction_layer(state, A, topo, LayerParams::bind(p, layer_name(l)));
  return state;
}

void init_readout(ParameterStore& store, const StageConfig& c, Rng& rng) {
  gnn::init_mlp(store, "readout", {c.node_width, c.head_width, 1}, rng);
}

Tensor readout(const Binding& p, const Tensor& H, const BatchTopology& topo) {
  return gnn::invariant_readout(H, Mlp::bind(p, "readout", 2), topo);
}

int pair_input(const StageConfig& c, int width) { return c.pair_form == gnn::PairForm::Literal ? 2 * width : width; }

void init_stage1_generator(ParameterStore& store, const StageConfig& c, Rng& rng) {
  int width = c.latent_width;
  for (int l = 0; l + 1 < c.layers; ++l) {
    const std::string name = "set" + std::to_string(l);
    gnn::init_linear(store, name + ".pair", pair_input(c, width), c.node_width, rng);
    gnn::init_linear(store, name + ".combine", width + c.node_width, c.node_width, rng);
    width = c.node_width;
  }
  gnn::init_linear(store, "scores.pair", pair_input(c, width), c.edge_width, rng);
  gnn::init_linear(store, "score", c.edge_width, 1, rng);
}

double gumbel(Rng& rng) {
  std::uniform_real_distribution<double> u(std::numeric_limits<double>::min(), 1.0);
  return -std::log(-std::log(u(rng)));
}

double logistic(Rng& rng) {
  std::uniform_real_distribution<double> u(std::numeric_limits<double>::min(), 1.0);
  const double x = u(rng);
  return std::log(x) - std::log1p(-x);
}

/// rows x cols noise; with `topo`, row (j,i) copies row (i,j) for i < j.
template <typename Draw>
Matrix noise_matrix(Index rows, Index cols, Rng& rng, const BatchTopology* topo, Draw draw) {
  Matrix out(rows, cols);
  if (!topo) {
    for (Index r = 0; r < rows; ++r)
      for (Index c = 0; c < cols; ++c) out(r, c) = draw(rng);
    return out;
  }
  const int n = topo->n();
  for (int b = 0; b < topo->batch(); ++b)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const Index ij = (static_cast<Index>(b) * n + i) * n + j;
        const Index ji = (static_cast<Index>(b) * n + j) * n + i;
        for (Index c = 0; c < cols; ++c) out(ij, c) = out(ji, c) = draw(rng);
      }
  return out;
}

Tensor relaxed_categorical(const Tensor& logits, const Relaxation& relax, const Tensor* mask, const BatchTopology* topo) {
  Tensor noisy = logits;
  if (relax.noise) noisy = add(logits, Tensor(noise_matrix(logits.rows(), logits.cols(), *relax.noise, topo, gumbel)));
  Tensor soft = softmax(scale(noisy, 1.0 / relax.tau));
  if (mask) soft = mul(soft, *mask);
  if (!relax.straight_through) return soft;
  return straight_through(argmax_one_hot(soft.value(), mask ? &mask->value() : nullptr), soft);
}

void check_rows(const Tensor& t, Index rows, const char* what) {
  if (t.rows() != rows) throw Error(ErrorCode::ShapeMismatch, std::string(what) + " has shape " + t.shape());
}

}  // namespace

GeneratorCalls& generator_calls() {
  thread_local GeneratorCalls calls;
  return calls;
}

ModelParams init_model(const StageConfig& c, int vocab_size, Rng& rng) {
  check(c);
  if (vocab_size < 1) throw Error(ErrorCode::BadConfig, "empty atom vocabulary");
  ModelParams m;
  m.stage = c.stage;
  switch (c.stage) {
    case StageId::Skeleton:
      init_stage1_generator(m.generator, c, rng);
      init_trunk(m.discriminator, c, 1, 1, rng);
      break;
    case StageId::NodeAttrs:
      init_trunk(m.generator, c, c.latent_width, 1, rng);
      gnn::init_linear(m.generator, "head", c.node_width, vocab_size, rng);
      init_trunk(m.discriminator, c, vocab_size, 1, rng);
      break;
    case StageId::EdgeAttrs:
      init_trunk(m.generator, c, c.latent_width + vocab_size, 1, rng);
      gnn::init_linear(m.generator, "head", c.edge_width, kBondTypes, rng);
      init_trunk(m.discriminator, c, vocab_size, 1 + kBondTypes, rng);
      break;
  }
  init_readout(m.discriminator, c, rng);
  return m;
}

Matrix sample_latent(int n, int width, Rng& rng) {
  if (n < 1) throw Error(ErrorCode::NEmpty, "latent set needs at least one node");
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix Z(n, width);
  // Row-major fill so a prefix of rows does not depend on the width of later ones.
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < width; ++c) Z(i, c) = normal(rng);
  return Z;
}

StageOutput stage1_generator(const Binding& g, const StageConfig& c, const Tensor& Z, const BatchTopology& topo,
                             const Relaxation& relax) {
  ++generator_calls().skeleton;
  check_rows(Z, topo.nodes(), "stage-1 latent");
  Tensor H = Z;
  for (int l = 0; l + 1 < c.layers; ++l) {
    auto p = gnn::DeepSetsParams::bind(g, "set" + std::to_string(l));
    p.form = c.pair_form;
    p.combine_activation = true;
    H = gnn::deepsets_pair_layer(H, p, topo);
  }
  gnn::DeepSetsParams scores;
  scores.pair = Linear::bind(g, "scores.pair");
  scores.form = c.pair_form;
  Tensor logits = gnn::deepsets_pair_scores(H, scores, Linear::bind(g, "score"), topo);

  Tensor noisy = logits;
  if (relax.noise) noisy = add(logits, Tensor(noise_matrix(logits.rows(), 1, *relax.noise, &topo, logistic)));
  Tensor soft = mul(sigmoid(scale(noisy, 1.0 / relax.tau)), topo.off_diagonal());
  if (!relax.straight_through) return {logits, soft};
  Matrix hard = soft.value().unaryExpr([](double p) { return p > 0.5 ? 1.0 : 0.0; });
  return {logits, straight_through(hard, soft)};
}

StageOutput stage2_generator(const Binding& g, const StageConfig& c, const Tensor& Z, const Tensor& A,
                             const BatchTopology& topo, const Relaxation& relax) {
  ++generator_calls().node;
  check_rows(Z, topo.nodes(), "stage-2 latent");
  NodeEdgeState state = run_trunk(g, c, {Z, A}, A, topo);
  Tensor logits = gnn::apply(Linear::bind(g, "head"), state.H);
  return {logits, relaxed_categorical(logits, relax, nullptr, nullptr)};
}

StageOutput stage3_generator(const Binding& g, const StageConfig& c, const Tensor& Z, const Tensor& X,
                             const Tensor& A, const BatchTopology& topo, const Relaxation& relax) {
  ++generator_calls().edge;
  check_rows(Z, topo.nodes(), "stage-3 latent");
  check_rows(X, topo.nodes(), "stage-3 node attributes");
  NodeEdgeState state = run_trunk(g, c, {concat_cols({Z, X}), A}, A, topo);
  Tensor raw = gnn::apply(Linear::bind(g, "head"), state.R);
  Tensor logits = scale(add(raw, gather_rows(raw, topo.transpose())), 0.5);
  return {logits, relaxed_categorical(logits, relax, &A, &topo)};
}

Tensor stage1_discriminator(const Binding& d, const StageConfig& c, const Tensor& A, const BatchTopology& topo) {
  Tensor ones(Matrix::Ones(topo.nodes(), 1));
  return readout(d, run_trunk(d, c, {ones, A}, A, topo).H, topo);
}

Tensor stage2_discriminator(const Binding& d, const StageConfig& c, const Tensor& X, const Tensor& A,
                            const BatchTopology& topo) {
  return readout(d, run_trunk(d, c, {X, A}, A, topo).H, topo);
}

Tensor stage3_discriminator(const Binding& d, const StageConfig& c, const Tensor& W, const Tensor& X,
                            const Tensor& A, const BatchTopology& topo) {
  return readout(d, run_trunk(d, c, {X, concat_cols({A, W})}, A, topo).H, topo);
}

Matrix edge_probabilities(const Matrix& logits, const BatchTopology& topo) {
  return sigmoid(Tensor(logits)).value().cwiseProduct(topo.off_diagonal().value());
}

Matrix categorical_probabilities(const Matrix& logits, const Matrix* mask) {
  Matrix p = softmax(Tensor(logits)).value();
  if (mask)
    for (Index r = 0; r < p.rows(); ++r)
      if ((*mask)(r, 0) == 0.0) p.row(r).setZero();
  return p;
}

Matrix argmax_one_hot(const Matrix& scores, const Matrix* mask) {
  Matrix out = Matrix::Zero(scores.rows(), scores.cols());
  for (Index r = 0; r < scores.rows(); ++r) {
    if (mask && (*mask)(r, 0) == 0.0) continue;
    Index best = 0;
    for (Index c = 1; c < scores.cols(); ++c)
      if (scores(r, c) > scores(r, best)) best = c;
    out(r, best) = 1.0;
  }
  return out;
}

Matrix sample_one_hot(const Matrix& logits, Rng& rng, const Matrix* mask, const BatchTopology* topo) {
  const Matrix p = categorical_probabilities(logits);
  Matrix out = Matrix::Zero(p.rows(), p.cols());
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto draw = [&](Index r) {
    const double x = u(rng);
    double acc = 0.0;
    Index pick = p.cols() - 1;
    for (Index c = 0; c < p.cols(); ++c) {
      acc += p(r, c);
      if (x < acc) {
        pick = c;
        break;
      }
    }
    return pick;
  };
  if (!topo) {
    for (Index r = 0; r < p.rows(); ++r)
      if (!mask || (*mask)(r, 0) != 0.0) out(r, draw(r)) = 1.0;
    return out;
  }
  const int n = topo->n();
  for (int b = 0; b < topo->batch(); ++b)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const Index ij = (static_cast<Index>(b) * n + i) * n + j;
        const Index ji = (static_cast<Index>(b) * n + j) * n + i;
        if (mask && (*mask)(ij, 0) == 0.0) continue;
        const Index c = draw(ij);
        out(ij, c) = out(ji, c) = 1.0;
      }
  return out;
}

Matrix threshold_edges(const Matrix& logits, const BatchTopology& topo, Rng* sample) {
  Matrix out = Matrix::Zero(logits.rows(), 1);
  const Matrix p = edge_probabilities(logits, topo);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = topo.n();
  for (int b = 0; b < topo.batch(); ++b)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const Index ij = (static_cast<Index>(b) * n + i) * n + j;
        const Index ji = (static_cast<Index>(b) * n + j) * n + i;
        const bool edge = sample ? u(*sample) < p(ij, 0) : logits(ij, 0) > 0.0;
        out(ij, 0) = out(ji, 0) = edge ? 1.0 : 0.0;
      }
  return out;
}

}  // namespace equigan::gan
