#include <doctest.h>

#include <cmath>

#include "equigan/verify/stage_maps.hpp"

using namespace equigan;
using namespace equigan::verify;

namespace {

std::shared_ptr<AtomVocab> carbon() {
  return std::make_shared<AtomVocab>(std::vector<AtomDescriptor>{{"C", 0, 0}});
}

MolecularGraph path3(const std::shared_ptr<AtomVocab>& vocab) {
  return MolecularGraph::from_edges({0, 0, 0}, {{0, 1, BondType::Single}, {1, 2, BondType::Single}}, vocab);
}

Matrix normal(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> d;
  Matrix m(rows, cols);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = d(rng);
  return m;
}

}  // namespace

TEST_CASE("row-wise maps are equivariant, positional ones are not") {
  Rng rng(1);
  const Matrix Z = normal(5, 3, rng);
  const auto doubled = check_equivariance([](const Matrix& z) -> Matrix { return 2.0 * z; }, Z, 20, rng);
  CHECK(doubled.max_deviation == 0.0);
  CHECK(doubled.trials == 20);

  const auto positional = check_equivariance(
      [](const Matrix& z) -> Matrix {
        Matrix out = z;
        for (Eigen::Index i = 0; i < z.rows(); ++i) out.row(i).array() += static_cast<double>(i);
        return out;
      },
      Z, 20, rng);
  CHECK(positional.max_deviation > 1e-3);
  CHECK(positional.worst.size() == 5);
}

TEST_CASE("pair and invariant blocks") {
  Rng rng(2);
  const int n = 4;
  SetInput input{n, normal(n, 2, rng), normal(n * n, 1, rng)};
  const SetFunction f = [](const SetInput& in) {
    SetOutput out;
    out.pairs = Matrix(in.n * in.n, 1);
    for (int i = 0; i < in.n; ++i)
      for (int j = 0; j < in.n; ++j) out.pairs(i * in.n + j, 0) = in.pairs(j * in.n + i, 0) + in.nodes(i, 0);
    out.invariant = Matrix::Constant(1, 1, in.nodes.sum() + in.pairs.sum());
    return out;
  };
  CHECK(check_equivariance(f, input, 30, rng).max_deviation < 1e-12);

  // Reading a fixed pair breaks invariance.
  const SetFunction corner = [](const SetInput& in) {
    SetOutput out;
    out.invariant = in.pairs.topRows(1);
    return out;
  };
  CHECK(check_equivariance(corner, input, 30, rng).max_deviation > 1e-3);

  const auto back = permute(permute(input, Permutation({1, 2, 3, 0})), Permutation({3, 0, 1, 2}));
  CHECK(back.nodes == input.nodes);
  CHECK(back.pairs == input.pairs);
}

TEST_CASE("decomposition invariance") {
  Rng rng(3);
  const Matrix Z = normal(6, 2, rng);
  const RowFunction sum_form = [](const RowVector& z, const Matrix& others) -> RowVector {
    return z + others.colwise().sum();
  };
  CHECK(check_decomposition_invariance(sum_form, Z, 50, rng) <= 1e-9);

  const RowFunction recurrence = [](const RowVector& z, const Matrix& others) -> RowVector {
    RowVector h = z;
    for (Eigen::Index r = 0; r < others.rows(); ++r) h = (0.7 * h + others.row(r)).array().tanh();
    return h;
  };
  CHECK(check_decomposition_invariance(recurrence, Z, 50, rng) > 0.0);

  const RowFunction count = [](const RowVector& z, const Matrix& others) -> RowVector {
    return RowVector::Constant(z.size(), static_cast<double>(others.rows()));
  };
  CHECK(check_decomposition_invariance(count, Z, 10, rng) == 0.0);
}

TEST_CASE("distinct labelings") {
  const auto vocab = carbon();
  CHECK(distinct_labelings(path3(vocab)) == 3);
  CHECK(distinct_labelings(MolecularGraph::from_edges({0, 0, 0},
                                                      {{0, 1, BondType::Single},
                                                       {1, 2, BondType::Single},
                                                       {0, 2, BondType::Single}},
                                                      vocab)) == 1);
  CHECK(distinct_labelings(MolecularGraph::from_edges({0, 0, 0, 0}, {{0, 1, BondType::Single}}, vocab)) == 6);
  CHECK(distinct_labelings(MolecularGraph::from_edges({0}, {}, vocab)) == 1);
}

TEST_CASE("equiprobability") {
  const auto vocab = carbon();
  Rng rng(4);

  const LatentGraphGenerator fixed = [&](int, Rng&) { return path3(vocab); };
  const auto bad = equiprobability_test(fixed, 3, 3000, rng);
  CHECK(bad.p_value < 1e-6);
  CHECK_FALSE(bad.passes());

  const LatentGraphGenerator relabeled = [&](int n, Rng& r) {
    return apply_permutation(path3(vocab), Permutation::random(n, r));
  };
  const auto good = equiprobability_test(relabeled, 3, 3000, rng);
  CHECK(good.dof == 2.0);
  CHECK(good.passes());

  const LatentGraphGenerator lone = [&](int, Rng&) { return MolecularGraph::from_edges({0}, {}, vocab); };
  CHECK(equiprobability_test(lone, 1, 100, rng).passes());

  // The list form agrees with the sampling form.
  std::vector<MolecularGraph> graphs;
  for (int t = 0; t < 300; ++t) graphs.push_back(path3(vocab));
  CHECK(equiprobability_statistic(graphs).p_value < 1e-6);
}

TEST_CASE("stage maps are equivariant at initialization") {
  const int vocab_size = 4;
  for (gan::StageId stage : {gan::StageId::Skeleton, gan::StageId::NodeAttrs, gan::StageId::EdgeAttrs}) {
    CAPTURE(gan::to_string(stage));
    gan::StageConfig c;
    c.stage = stage;
    c.latent_width = 3;
    c.node_width = 4;
    c.edge_width = 3;
    c.head_width = 4;
    c.layers = 2;
    Rng rng(5);
    const gan::StageModel model{c, gan::init_model(c, vocab_size, rng)};
    for (int n : {1, 2, 5}) {
      const auto g_in = random_generator_input(model, n, vocab_size, rng);
      CHECK(check_equivariance(generator_map(model, vocab_size), g_in, 10, rng).max_deviation <= 1e-9);
      const auto d_in = random_discriminator_input(model, n, vocab_size, rng);
      CHECK(check_equivariance(discriminator_map(model), d_in, 10, rng).max_deviation <= 1e-9);
    }
  }
}
