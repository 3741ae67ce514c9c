#include "equigan/gan/loss.hpp"

namespace equigan::gan {

using namespace ad;

Batch make_batch(const std::vector<const MolecularGraph*>& graphs) {
  if (graphs.empty()) throw Error(ErrorCode::EmptyBatch, "batch has no graphs");
  Batch b;
  b.n = graphs.front()->n();
  b.size = static_cast<int>(graphs.size());
  const Index n = b.n, k = graphs.front()->X().cols(), nn = n * n;
  b.A.resize(b.size * nn, 1);
  b.X.resize(b.size * n, k);
  b.W.resize(b.size * nn, kBondTypes);
  for (int g = 0; g < b.size; ++g) {
    const MolecularGraph& m = *graphs[static_cast<std::size_t>(g)];
    if (m.n() != b.n || m.X().cols() != k)
      throw Error(ErrorCode::SizeMismatch, "batch mixes graphs of different sizes");
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) b.A(g * nn + i * n + j, 0) = m.A()(i, j);
    b.X.middleRows(g * n, n) = m.X();
    b.W.middleRows(g * nn, nn) = m.W();
  }
  return b;
}

const Matrix& data_variable(StageId stage, const Batch& batch) {
  switch (stage) {
    case StageId::Skeleton: return batch.A;
    case StageId::NodeAttrs: return batch.X;
    case StageId::EdgeAttrs: return batch.W;
  }
  return batch.A;
}

Tensor critic(StageId stage, const Binding& d, const StageConfig& c, const Tensor& generated, const Batch& cond,
              const BatchTopology& topo) {
  switch (stage) {
    case StageId::Skeleton: return stage1_discriminator(d, c, generated, topo);
    case StageId::NodeAttrs: return stage2_discriminator(d, c, generated, Tensor(cond.A), topo);
    case StageId::EdgeAttrs: return stage3_discriminator(d, c, generated, Tensor(cond.X), Tensor(cond.A), topo);
  }
  throw Error(ErrorCode::BadConfig, "unknown stage");
}

Tensor gradient_penalty(StageId stage, const Batch& real, const Matrix& fake, const Binding& d, const StageConfig& c,
                        const BatchTopology& topo, const PenaltyInput& input) {
  if (!input.tape) throw Error(ErrorCode::ForeignTape, "gradient penalty needs the critic's tape");
  const Matrix& x = data_variable(stage, real);
  if (x.rows() != fake.rows() || x.cols() != fake.cols())
    throw Error(ErrorCode::ShapeMismatch, "real and fake batches differ in shape");
  if (input.epsilon.rows() != real.size || input.epsilon.cols() != 1)
    throw Error(ErrorCode::ShapeMismatch, "interpolation weights must be batch x 1");

  // Node-indexed for X, pair-indexed for A and W.
  const Index rows_per_graph = x.rows() / real.size;
  std::vector<Index> graph_of_row(static_cast<std::size_t>(x.rows()));
  for (Index r = 0; r < x.rows(); ++r) graph_of_row[static_cast<std::size_t>(r)] = r / rows_per_graph;
  const IndexList rows = make_index(std::move(graph_of_row));

  Matrix mixed(x.rows(), x.cols());
  for (Index r = 0; r < x.rows(); ++r) {
    const double e = input.epsilon((*rows)[static_cast<std::size_t>(r)], 0);
    mixed.row(r) = e * x.row(r) + (1.0 - e) * fake.row(r);
  }
  Tensor point = input.tape->variable(std::move(mixed));
  Tensor scores = critic(stage, d, c, point, real, topo);
  Tensor grad = input.tape->gradient(sum(scores), {point}, true).front();
  Tensor squared = scatter_add_rows(reduce_sum(mul(grad, grad), 1), rows, real.size);
  // The offset keeps the square root differentiable at a zero gradient.
  Tensor norm = pow(add_scalar(squared, 1e-12), 0.5);
  return mean(pow(add_scalar(norm, -1.0), 2.0));
}

StageLoss wgan_stage_loss(StageId stage, const Batch& real, const Tensor& fake, const Binding& d, const StageConfig& c,
                          const BatchTopology& topo, const PenaltyInput* penalty) {
  if (real.size == 0) throw Error(ErrorCode::EmptyBatch, "empty real batch");
  if (fake.rows() == 0) throw Error(ErrorCode::EmptyBatch, "empty fake batch");
  Tensor d_real = critic(stage, d, c, Tensor(data_variable(stage, real)), real, topo);
  Tensor d_fake = critic(stage, d, c, fake, real, topo);
  StageLoss out;
  out.g_loss = mean(d_fake);
  out.value = add(mean(neg(d_real)), out.g_loss);
  out.d_loss = neg(out.value);
  if (penalty) {
    out.penalty = gradient_penalty(stage, real, fake.value(), d, c, topo, *penalty);
    out.d_loss = add(out.d_loss, scale(out.penalty, c.gp_weight));
  }
  return out;
}

}  // namespace equigan::gan
