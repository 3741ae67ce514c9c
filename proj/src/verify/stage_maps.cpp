#include "equigan/verify/stage_maps.hpp"

namespace equigan::verify {

using gan::StageId;
using gnn::BatchTopology;
using gnn::Binding;

namespace {

constexpr gan::Relaxation kExact{1.0, nullptr, false};

Matrix random_skeleton(int n, Rng& rng) {
  std::bernoulli_distribution edge(0.5);
  Matrix A = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) A(i, j) = A(j, i) = edge(rng) ? 1.0 : 0.0;
  return A;
}

Matrix random_one_hot(Eigen::Index rows, int width, Rng& rng) {
  std::uniform_int_distribution<int> pick(0, width - 1);
  Matrix out = Matrix::Zero(rows, width);
  for (Eigen::Index r = 0; r < rows; ++r) out(r, pick(rng)) = 1.0;
  return out;
}

/// Symmetric one-hot bond types on edges of A, zero elsewhere.
Matrix random_bonds(const Matrix& A, Rng& rng) {
  const int n = static_cast<int>(A.rows());
  std::uniform_int_distribution<int> pick(0, kBondTypes - 1);
  Matrix W = Matrix::Zero(static_cast<Eigen::Index>(n) * n, kBondTypes);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (A(i, j) != 0.0) {
        const int t = pick(rng);
        W(i * n + j, t) = W(j * n + i, t) = 1.0;
      }
  return W;
}

Matrix columns(const Matrix& m, Eigen::Index start, Eigen::Index count) { return m.middleCols(start, count); }

Matrix with_probabilities(const Matrix& logits, const Matrix& probabilities) {
  Matrix out(logits.rows(), logits.cols() + probabilities.cols());
  out << logits, probabilities;
  return out;
}

}  // namespace

SetFunction generator_map(const gan::StageModel& model, int vocab_size) {
  return [model, vocab_size](const SetInput& in) {
    const BatchTopology topo(1, in.n);
    const Binding g(model.params.generator, nullptr);
    const auto& c = model.config;
    SetOutput out;
    switch (model.params.stage) {
      case StageId::Skeleton: {
        const auto r = gan::stage1_generator(g, c, ad::Tensor(in.nodes), topo, kExact);
        out.pairs = with_probabilities(r.logits.value(), r.sample.value());
        break;
      }
      case StageId::NodeAttrs: {
        const auto r = gan::stage2_generator(g, c, ad::Tensor(in.nodes), ad::Tensor(in.pairs), topo, kExact);
        out.nodes = with_probabilities(r.logits.value(), r.sample.value());
        break;
      }
      case StageId::EdgeAttrs: {
        const auto r = gan::stage3_generator(g, c, ad::Tensor(columns(in.nodes, 0, c.latent_width)),
                                             ad::Tensor(columns(in.nodes, c.latent_width, vocab_size)),
                                             ad::Tensor(in.pairs), topo, kExact);
        out.pairs = with_probabilities(r.logits.value(), r.sample.value());
        break;
      }
    }
    return out;
  };
}

SetFunction discriminator_map(const gan::StageModel& model) {
  return [model](const SetInput& in) {
    const BatchTopology topo(1, in.n);
    const Binding d(model.params.discriminator, nullptr);
    const auto& c = model.config;
    SetOutput out;
    switch (model.params.stage) {
      case StageId::Skeleton:
        out.invariant = gan::stage1_discriminator(d, c, ad::Tensor(in.pairs), topo).value();
        break;
      case StageId::NodeAttrs:
        out.invariant = gan::stage2_discriminator(d, c, ad::Tensor(in.nodes), ad::Tensor(in.pairs), topo).value();
        break;
      case StageId::EdgeAttrs:
        out.invariant = gan::stage3_discriminator(d, c, ad::Tensor(columns(in.pairs, 1, kBondTypes)),
                                                  ad::Tensor(in.nodes), ad::Tensor(columns(in.pairs, 0, 1)), topo)
                            .value();
        break;
    }
    return out;
  };
}

SetInput random_generator_input(const gan::StageModel& model, int n, int vocab_size, Rng& rng) {
  const auto& c = model.config;
  SetInput in;
  in.n = n;
  const Matrix Z = gan::sample_latent(n, c.latent_width, rng);
  const Matrix A = random_skeleton(n, rng);
  switch (model.params.stage) {
    case StageId::Skeleton: in.nodes = Z; break;
    case StageId::NodeAttrs:
      in.nodes = Z;
      in.pairs = gnn::adjacency_column({A});
      break;
    case StageId::EdgeAttrs: {
      const Matrix X = random_one_hot(n, vocab_size, rng);
      in.nodes.resize(n, Z.cols() + X.cols());
      in.nodes << Z, X;
      in.pairs = gnn::adjacency_column({A});
      break;
    }
  }
  return in;
}

SetInput random_discriminator_input(const gan::StageModel& model, int n, int vocab_size, Rng& rng) {
  SetInput in;
  in.n = n;
  const Matrix A = random_skeleton(n, rng);
  const Matrix column = gnn::adjacency_column({A});
  switch (model.params.stage) {
    case StageId::Skeleton: in.pairs = column; break;
    case StageId::NodeAttrs:
      in.nodes = random_one_hot(n, vocab_size, rng);
      in.pairs = column;
      break;
    case StageId::EdgeAttrs: {
      in.nodes = random_one_hot(n, vocab_size, rng);
      const Matrix W = random_bonds(A, rng);
      in.pairs.resize(column.rows(), 1 + kBondTypes);
      in.pairs << column, W;
      break;
    }
  }
  return in;
}

LatentGraphGenerator skeleton_generator(const gan::StageModel& stage1) {
  auto vocab = std::make_shared<const AtomVocab>(std::vector<AtomDescriptor>{{"C", 0, 0}});
  return [stage1, vocab](int n, Rng& rng) {
    const Matrix column = gan::generate_skeleton(stage1, n, rng);
    std::vector<MolecularGraph::Edge> edges;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (column(static_cast<Eigen::Index>(i) * n + j, 0) != 0.0) edges.push_back({i, j, BondType::Single});
    return MolecularGraph::from_edges(std::vector<int>(static_cast<std::size_t>(n), 0), edges, vocab);
  };
}

}  // namespace equigan::verify
