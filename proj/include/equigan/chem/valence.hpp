#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "equigan/graph.hpp"

namespace equigan::chem {

/// Allowed total bond-order sums (bonds + hydrogens) per (element, charge).
/// Aromatic bonds count 1.5.
class ValenceTable {
 public:
  /// C 4; N 3, N+ 4, N- 2; O 2, O- 1, O+ 3; F 1.
  static const ValenceTable& standard();

  void set(const std::string& element, int charge, std::vector<double> allowed);
  const std::vector<double>* allowed(const std::string& element, int charge) const;
  bool allows(const std::string& element, int charge, double total) const;

  /// Hydrogens that bring `bond_sum` to the smallest allowed valence reachable
  /// with an integral hydrogen count, if any.
  std::optional<int> implicit_hydrogens(const std::string& element, int charge, double bond_sum) const;

  bool covers(const AtomVocab& vocab) const;

 private:
  std::map<std::pair<std::string, int>, std::vector<double>> table_;
};

/// Sum of bond orders of the edges incident to node i.
double bond_order_sum(const MolecularGraph& graph, int i);

/// Chemical validity: every atom's bond-order sum plus hydrogens is an allowed
/// valence, every aromatic bond lies on a cycle of aromatic bonds, and the
/// graph is connected.
bool check_valence(const MolecularGraph& graph, const ValenceTable& table = ValenceTable::standard());

bool is_connected(const MolecularGraph& graph);

}  // namespace equigan::chem
