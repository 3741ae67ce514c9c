#include "equigan/chem/valence.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace equigan::chem {

const ValenceTable& ValenceTable::standard() {
  static const ValenceTable table = [] {
    ValenceTable t;
    t.set("C", 0, {4});
    t.set("N", 0, {3});
    t.set("N", 1, {4});
    t.set("N", -1, {2});
    t.set("O", 0, {2});
    t.set("O", -1, {1});
    t.set("O", 1, {3});
    t.set("F", 0, {1});
    return t;
  }();
  return table;
}

void ValenceTable::set(const std::string& element, int charge, std::vector<double> allowed) {
  std::sort(allowed.begin(), allowed.end());
  table_[{element, charge}] = std::move(allowed);
}

const std::vector<double>* ValenceTable::allowed(const std::string& element, int charge) const {
  auto it = table_.find({element, charge});
  return it == table_.end() ? nullptr : &it->second;
}

bool ValenceTable::allows(const std::string& element, int charge, double total) const {
  const auto* values = allowed(element, charge);
  if (!values) return false;
  return std::find(values->begin(), values->end(), total) != values->end();
}

std::optional<int> ValenceTable::implicit_hydrogens(const std::string& element, int charge, double bond_sum) const {
  const auto* values = allowed(element, charge);
  if (!values) return std::nullopt;
  for (double v : *values) {
    const double h = v - bond_sum;
    if (h >= 0.0 && h == std::floor(h)) return static_cast<int>(h);
  }
  return std::nullopt;
}

bool ValenceTable::covers(const AtomVocab& vocab) const {
  for (const auto& atom : vocab.entries())
    if (!allowed(atom.element, atom.formal_charge)) return false;
  return true;
}

double bond_order_sum(const MolecularGraph& g, int i) {
  double total = 0.0;
  for (int j = 0; j < g.n(); ++j)
    if (j != i && g.has_edge(i, j)) total += bond_order(g.bond(i, j));
  return total;
}

namespace {

/// Whether `from` reaches `to` using only edges accepted by `use`.
bool reachable(const MolecularGraph& g, int from, int to, const std::function<bool(int, int)>& use) {
  std::vector<char> seen(static_cast<std::size_t>(g.n()), 0);
  std::vector<int> stack{from};
  seen[static_cast<std::size_t>(from)] = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    if (u == to) return true;
    for (int v = 0; v < g.n(); ++v) {
      if (seen[static_cast<std::size_t>(v)] || !g.has_edge(u, v) || !use(u, v)) continue;
      seen[static_cast<std::size_t>(v)] = 1;
      stack.push_back(v);
    }
  }
  return false;
}

}  // namespace

bool is_connected(const MolecularGraph& g) {
  if (g.n() == 0) return false;
  for (int v = 1; v < g.n(); ++v)
    if (!reachable(g, 0, v, [](int, int) { return true; })) return false;
  return true;
}

bool check_valence(const MolecularGraph& g, const ValenceTable& table) {
  if (g.n() == 0) return false;
  for (int i = 0; i < g.n(); ++i) {
    const auto& atom = g.atom(i);
    if (!table.allows(atom.element, atom.formal_charge, bond_order_sum(g, i) + atom.explicit_h)) return false;
  }
  for (const auto& e : g.edges()) {
    if (e.type != BondType::Aromatic) continue;
    // The bond is on an all-aromatic cycle iff its ends stay connected
    // through other aromatic bonds.
    auto other_aromatic = [&](int u, int v) {
      if ((u == e.i && v == e.j) || (u == e.j && v == e.i)) return false;
      return g.bond(u, v) == BondType::Aromatic;
    };
    if (!reachable(g, e.i, e.j, other_aromatic)) return false;
  }
  return is_connected(g);
}

}  // namespace equigan::chem
