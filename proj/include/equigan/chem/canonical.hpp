#pragma once

#include <compare>
#include <string>
#include <vector>

#include "equigan/graph.hpp"

namespace equigan::chem {

/// Opaque canonical byte string; equal exactly for isomorphic attributed graphs.
struct Certificate {
  std::string bytes;

  std::string hex() const;
  static Certificate from_hex(const std::string& hex);

  auto operator<=>(const Certificate&) const = default;
  bool operator==(const Certificate&) const = default;
};

struct CertificateHash {
  std::size_t operator()(const Certificate& c) const noexcept { return std::hash<std::string>{}(c.bytes); }
};

struct CanonicalForm {
  Certificate certificate;
  /// order[p] is the node placed at canonical position p.
  std::vector<int> order;
};

/// Serialization of `graph` relabeled so that node order[p] sits at position p.
/// Atoms are written by descriptor, so the bytes do not depend on vocab indices.
std::string serialize_labeling(const MolecularGraph& graph, const std::vector<int>& order);

/// Individualization-refinement canonical labeling: colour refinement on
/// (descriptor, multiset of neighbour colour x bond type), branching on every
/// vertex of the first minimal-colour non-singleton cell, keeping the
/// lexicographically least serialization. Subtrees equivalent under an
/// automorphism already discovered are skipped.
CanonicalForm canonical_form(const MolecularGraph& graph);
Certificate canonical_certificate(const MolecularGraph& graph);

}  // namespace equigan::chem
