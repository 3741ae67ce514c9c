#include <doctest.h>

#include <algorithm>

#include "equigan/graph.hpp"
#include "support.hpp"

using namespace equigan;

namespace {

std::shared_ptr<const AtomVocab> cno() {
  return std::make_shared<AtomVocab>(
      std::vector<AtomDescriptor>{{"C", 0, 4}, {"C", 0, 3}, {"C", 0, 2}, {"N", 0, 3}, {"O", 0, 1}});
}

MolecularGraph path3() {
  return MolecularGraph::from_edges({2, 2, 4}, {{0, 1, BondType::Single}, {1, 2, BondType::Single}}, cno());
}

ErrorCode violation(const MolecularGraph& g) {
  auto v = validate(g);
  REQUIRE(v.has_value());
  return v->code;
}

}  // namespace

TEST_CASE("validate accepts a lone atom") {
  Matrix X = Matrix::Zero(1, 5);
  X(0, 0) = 1;
  MolecularGraph g(Matrix::Zero(1, 1), X, Matrix::Zero(1, kBondTypes), cno());
  CHECK_FALSE(validate(g).has_value());
}

TEST_CASE("validate reports the first broken invariant") {
  Matrix X = Matrix::Zero(2, 5);
  X(0, 0) = X(1, 0) = 1;
  Matrix A = Matrix::Zero(2, 2);
  A(0, 1) = A(1, 0) = 1;
  CHECK(violation(MolecularGraph(A, X, Matrix::Zero(4, kBondTypes), cno())) == ErrorCode::EdgeAttrMismatch);

  Matrix X3 = Matrix::Zero(3, 5);
  X3.col(0).setOnes();
  Matrix A3 = Matrix::Zero(3, 3);
  A3(0, 1) = 1;
  Matrix W3 = Matrix::Zero(9, kBondTypes);
  W3(1, 0) = 1;
  auto v = validate(MolecularGraph(A3, X3, W3, cno()));
  REQUIRE(v);
  CHECK(v->code == ErrorCode::AsymmetricA);
  CHECK(v->i == 0);
  CHECK(v->j == 1);

  Matrix loop = Matrix::Zero(2, 2);
  loop(1, 1) = 1;
  CHECK(violation(MolecularGraph(loop, X, Matrix::Zero(4, kBondTypes), cno())) == ErrorCode::SelfLoop);

  Matrix two_hot = X;
  two_hot(1, 3) = 1;
  CHECK(violation(MolecularGraph(Matrix::Zero(2, 2), two_hot, Matrix::Zero(4, kBondTypes), cno())) ==
        ErrorCode::NonOneHotRow);

  Matrix W = Matrix::Zero(4, kBondTypes);
  W(1, 0) = 1;  // (0,1) single
  W(2, 1) = 1;  // (1,0) double
  CHECK(violation(MolecularGraph(A, X, W, cno())) == ErrorCode::AsymmetricW);
}

TEST_CASE("identity permutation leaves a graph unchanged") {
  const auto g = path3();
  CHECK(apply_permutation(g, Permutation::identity(3)) == g);
}

TEST_CASE("swapping a bonded pair keeps A and swaps X rows") {
  const auto g = MolecularGraph::from_edges({0, 3}, {{0, 1, BondType::Double}}, cno());
  const auto h = apply_permutation(g, Permutation({1, 0}));
  CHECK(h.A() == g.A());
  CHECK(h.X().row(0) == g.X().row(1));
  CHECK(h.X().row(1) == g.X().row(0));
}

TEST_CASE("path relabeling matches index-by-index oracle") {
  const auto g = path3();
  const Permutation pi({2, 0, 1});
  const auto h = apply_permutation(g, pi);
  CHECK(h.has_edge(2, 0));
  CHECK(h.has_edge(0, 1));
  CHECK_FALSE(h.has_edge(1, 2));
  CHECK(testing::same_under(g, h, pi.mapping()));
  CHECK_FALSE(validate(h).has_value());
}

TEST_CASE("apply_permutation rejects a size mismatch") {
  CHECK_THROWS_AS(apply_permutation(path3(), Permutation::identity(2)), Error);
}

TEST_CASE("permutations compose and invert") {
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const int n = 1 + t % 7;
    const auto pi = Permutation::random(n, rng);
    const auto sigma = Permutation::random(n, rng);
    CHECK(pi.compose(pi.inverse()) == Permutation::identity(n));
    for (int i = 0; i < n; ++i) CHECK(sigma.compose(pi)(i) == sigma(pi(i)));
  }
  CHECK_THROWS_AS(Permutation({0, 0}), Error);
}

TEST_CASE("relabeling twice equals relabeling by the composition") {
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    const auto g = testing::random_molecule(rng, 9);
    const auto pi = Permutation::random(g.n(), rng);
    const auto sigma = Permutation::random(g.n(), rng);
    const auto twice = apply_permutation(apply_permutation(g, pi), sigma);
    CHECK(twice == apply_permutation(g, sigma.compose(pi)));
    CHECK_FALSE(validate(twice).has_value());
  }
}

TEST_CASE("node tuples") {
  const auto vocab = cno();
  SUBCASE("lone atom has an empty multiset") {
    const auto g = MolecularGraph::from_edges({0}, {}, vocab);
    const auto t = node_tuple(g, 0);
    CHECK(t.incident.empty());
    CHECK(t.attributes == std::vector<double>{1, 0, 0, 0, 0});
  }
  SUBCASE("single-bonded pair") {
    const auto g = MolecularGraph::from_edges({0, 0}, {{0, 1, BondType::Single}}, vocab);
    for (int i = 0; i < 2; ++i) {
      const auto t = node_tuple(g, i);
      REQUIRE(t.incident.size() == 1);
      CHECK(t.incident[0] == std::array<double, kBondTypes>{1, 0, 0, 0});
    }
  }
  SUBCASE("star centred at 0 against direct enumeration") {
    const auto g = MolecularGraph::from_edges({1, 3, 4}, {{0, 1, BondType::Single}, {0, 2, BondType::Double}}, vocab);
    for (int i = 0; i < 3; ++i) {
      std::vector<std::array<double, kBondTypes>> expected;
      for (int j = 0; j < 3; ++j) {
        if (j == i) continue;
        std::array<double, kBondTypes> w{};
        for (int c = 0; c < kBondTypes; ++c) w[c] = g.W()(i * 3 + j, c);
        expected.push_back(w);
      }
      std::sort(expected.begin(), expected.end());
      CHECK(node_tuple(g, i).incident == expected);
    }
    const auto centre = node_tuple(g, 0).incident;
    CHECK(std::count_if(centre.begin(), centre.end(), [](const auto& w) { return w != std::array<double, kBondTypes>{}; }) == 2);
    for (int leaf : {1, 2}) {
      const auto t = node_tuple(g, leaf).incident;
      CHECK(std::count(t.begin(), t.end(), std::array<double, kBondTypes>{}) == 1);
    }
  }
  CHECK_THROWS_AS(node_tuple(path3(), 3), Error);
}

TEST_CASE("multiset of node tuples is permutation invariant") {
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    const auto g = testing::random_molecule(rng, 9);
    const auto h = apply_permutation(g, Permutation::random(g.n(), rng));
    std::vector<NodeTuple> a, b;
    for (int i = 0; i < g.n(); ++i) {
      a.push_back(node_tuple(g, i));
      b.push_back(node_tuple(h, i));
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
  }
}

TEST_CASE("vocab indices are stable and descriptors are bounded") {
  AtomVocab v;
  CHECK(v.add({"C", 0, 4}) == 0);
  CHECK(v.add({"N", 1, 4}) == 1);
  CHECK(v.add({"C", 0, 4}) == 0);
  CHECK(v.index_of({"N", 1, 4}) == 1);
  CHECK_FALSE(v.find({"O", 0, 2}).has_value());
  CHECK_THROWS_AS(v.add({"Cl", 0, 0}), Error);
  CHECK_THROWS_AS(v.add({"C", 3, 0}), Error);
  CHECK_THROWS_AS(v.add({"C", 0, 5}), Error);
}
