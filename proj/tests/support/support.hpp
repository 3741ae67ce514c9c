#pragma once

// Oracles and fixtures shared by the unit and acceptance tests. Everything
// here is written independently of the library code it is used to check.

#include <algorithm>
#include <memory>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "equigan/chem/smiles.hpp"
#include "equigan/chem/valence.hpp"
#include "equigan/graph.hpp"

namespace equigan::testing {

/// Graph of `smiles` over a vocabulary holding exactly its own descriptors.
inline MolecularGraph molecule(const std::string& smiles) {
  const auto parsed = chem::parse_smiles(smiles);
  auto vocab = std::make_shared<AtomVocab>();
  for (const auto& a : parsed.atoms) vocab->add(a);
  return chem::to_graph(parsed, vocab);
}

/// Plain-loop relabeling: out[p(i), p(j)] = in[i, j].
inline bool same_under(const MolecularGraph& a, const MolecularGraph& b, const std::vector<int>& p) {
  const int n = a.n();
  for (int i = 0; i < n; ++i) {
    if (!(a.atom(i) == b.atom(p[i]))) return false;
    for (int j = 0; j < n; ++j) {
      if (a.A()(i, j) != b.A()(p[i], p[j])) return false;
      for (int t = 0; t < kBondTypes; ++t)
        if (a.W()(i * n + j, t) != b.W()(p[i] * n + p[j], t)) return false;
    }
  }
  return true;
}

/// Tries all n! bijections.
inline bool brute_force_isomorphic(const MolecularGraph& a, const MolecularGraph& b) {
  if (a.n() != b.n()) return false;
  std::vector<int> p(static_cast<std::size_t>(a.n()));
  std::iota(p.begin(), p.end(), 0);
  do {
    if (same_under(a, b, p)) return true;
  } while (std::next_permutation(p.begin(), p.end()));
  return false;
}

/// Random chemically valid molecule with 1..max_n heavy atoms: an optional
/// aromatic ring, a random tree of the remaining atoms with bond orders
/// bounded by the free valence on both ends, a few ring closures, and
/// hydrogens filling every atom to its valence.
inline MolecularGraph random_molecule(Rng& rng, int max_n) {
  struct Kind {
    const char* element;
    int charge;
    int valence;
  };
  static const Kind kinds[] = {{"C", 0, 4}, {"C", 0, 4}, {"C", 0, 4}, {"N", 0, 3}, {"O", 0, 2},
                               {"F", 0, 1}, {"N", 1, 4}, {"O", -1, 1}, {"N", -1, 2}, {"O", 1, 3}};
  auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

  const int n = uniform(1, max_n);
  std::vector<Kind> atoms;
  std::vector<double> used;
  std::vector<MolecularGraph::Edge> edges;
  std::vector<std::vector<bool>> adjacent(static_cast<std::size_t>(n), std::vector<bool>(n, false));
  auto connect = [&](int i, int j, BondType t) {
    edges.push_back({i, j, t});
    adjacent[i][j] = adjacent[j][i] = true;
    used[i] += bond_order(t);
    used[j] += bond_order(t);
  };
  auto free_valence = [&](int i) { return atoms[i].valence - used[i]; };

  int placed = 0;
  if (n >= 5 && uniform(0, 2) == 0) {
    const int ring = std::min(n, uniform(5, 6));
    for (int r = 0; r < ring; ++r) {
      // Ring members need room for 3 (two aromatic bonds).
      atoms.push_back(uniform(0, 3) == 0 ? Kind{"N", 0, 3} : Kind{"C", 0, 4});
      used.push_back(0.0);
    }
    for (int r = 0; r < ring; ++r) connect(r, (r + 1) % ring, BondType::Aromatic);
    placed = ring;
  }
  for (int v = placed; v < n; ++v) {
    std::vector<int> hosts;
    for (int u = 0; u < v; ++u)
      if (free_valence(u) >= 1.0) hosts.push_back(u);
    Kind kind = kinds[uniform(0, 9)];
    if (v > 0 && hosts.empty()) break;
    if (v > 0 && kind.valence < 1) kind = kinds[0];
    atoms.push_back(kind);
    used.push_back(0.0);
    if (v == 0) continue;
    const int host = hosts[static_cast<std::size_t>(uniform(0, static_cast<int>(hosts.size()) - 1))];
    const int max_order = static_cast<int>(std::min({3.0, free_valence(host), free_valence(v)}));
    if (max_order < 1) {
      atoms.pop_back();
      used.pop_back();
      break;
    }
    connect(host, v, static_cast<BondType>(uniform(1, max_order) - 1));
  }
  const int m = static_cast<int>(atoms.size());
  for (int extra = uniform(0, 2); extra > 0; --extra) {
    const int i = uniform(0, m - 1), j = uniform(0, m - 1);
    if (i == j || adjacent[i][j] || free_valence(i) < 1.0 || free_valence(j) < 1.0) continue;
    connect(i, j, BondType::Single);
  }

  auto vocab = std::make_shared<AtomVocab>();
  std::vector<int> types;
  for (int i = 0; i < m; ++i) {
    const int h = static_cast<int>(free_valence(i));
    types.push_back(vocab->add(AtomDescriptor{atoms[i].element, atoms[i].charge, h}));
  }
  return MolecularGraph::from_edges(types, edges, vocab);
}

}  // namespace equigan::testing
