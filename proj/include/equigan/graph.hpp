#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "equigan/error.hpp"

namespace equigan {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Rng = std::mt19937_64;

/// Bond channels of the edge-attribute tensor, in fixed order.
enum class BondType : int { Single = 0, Double = 1, Triple = 2, Aromatic = 3 };
inline constexpr int kBondTypes = 4;

/// Bond order contribution toward an atom's valence sum.
double bond_order(BondType type);

/// Heavy atom with its formal charge and attached hydrogen count.
struct AtomDescriptor {
  std::string element;
  int formal_charge = 0;
  int explicit_h = 0;

  auto operator<=>(const AtomDescriptor&) const = default;
  bool operator==(const AtomDescriptor&) const = default;
};

std::string to_string(const AtomDescriptor& atom);

/// Ordered set of atom descriptors. Indices are stable once assigned.
class AtomVocab {
 public:
  AtomVocab() = default;
  explicit AtomVocab(std::vector<AtomDescriptor> entries,
                     std::vector<std::string> elements = default_elements());

  static std::vector<std::string> default_elements() { return {"C", "N", "O", "F"}; }

  /// Returns the index of `atom`, inserting it if absent.
  int add(const AtomDescriptor& atom);
  std::optional<int> find(const AtomDescriptor& atom) const;
  int index_of(const AtomDescriptor& atom) const;

  const AtomDescriptor& operator[](int index) const { return entries_.at(static_cast<std::size_t>(index)); }
  int size() const { return static_cast<int>(entries_.size()); }
  const std::vector<AtomDescriptor>& entries() const { return entries_; }
  const std::vector<std::string>& elements() const { return elements_; }

 private:
  void check(const AtomDescriptor& atom) const;

  std::vector<AtomDescriptor> entries_;
  std::vector<std::string> elements_ = default_elements();
  std::map<AtomDescriptor, int> index_;
};

/// Attributed molecular graph in (A, X, W) form.
///
/// A is n x n binary, X is n x k one-hot over the vocabulary, W is stored as
/// an (n*n) x 4 matrix whose row i*n+j holds the bond-type vector of the
/// ordered pair (i, j). Construction only checks shapes; use validate() for
/// the encoding invariants.
class MolecularGraph {
 public:
  MolecularGraph() = default;
  MolecularGraph(Matrix adjacency, Matrix atoms, Matrix bonds, std::shared_ptr<const AtomVocab> vocab);

  /// Builds a graph from atom vocab indices and an edge list.
  struct Edge {
    int i;
    int j;
    BondType type;
  };
  static MolecularGraph from_edges(const std::vector<int>& atom_types, const std::vector<Edge>& edges,
                                   std::shared_ptr<const AtomVocab> vocab);

  int n() const { return static_cast<int>(adjacency_.rows()); }
  const Matrix& A() const { return adjacency_; }
  const Matrix& X() const { return atoms_; }
  const Matrix& W() const { return bonds_; }
  const AtomVocab& vocab() const { return *vocab_; }
  const std::shared_ptr<const AtomVocab>& vocab_ptr() const { return vocab_; }

  /// Bond-type vector of the ordered pair (i, j).
  Eigen::Matrix<double, 1, kBondTypes> w(int i, int j) const { return bonds_.row(i * n() + j); }
  bool has_edge(int i, int j) const { return adjacency_(i, j) != 0.0; }

  /// Vocab index of the hot entry in row i of X; requires a one-hot row.
  int atom_type(int i) const;
  const AtomDescriptor& atom(int i) const { return (*vocab_)[atom_type(i)]; }
  /// Bond type of an existing edge.
  BondType bond(int i, int j) const;

  std::vector<Edge> edges() const;

  bool operator==(const MolecularGraph& other) const;

 private:
  Matrix adjacency_;
  Matrix atoms_;
  Matrix bonds_;
  std::shared_ptr<const AtomVocab> vocab_;
};

/// Bijection on {0, ..., n-1}; mapping[i] is the image of i.
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<int> mapping);

  static Permutation identity(int n);
  static Permutation random(int n, Rng& rng);

  int size() const { return static_cast<int>(mapping_.size()); }
  int operator()(int i) const { return mapping_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& mapping() const { return mapping_; }

  Permutation inverse() const;
  /// (this o inner)(i) = this(inner(i)).
  Permutation compose(const Permutation& inner) const;

  bool operator==(const Permutation&) const = default;

 private:
  std::vector<int> mapping_;
};

/// Outcome of validate(): empty when every invariant holds.
struct GraphViolation {
  ErrorCode code;
  int i = -1;
  int j = -1;
  std::string message;
};

std::optional<GraphViolation> validate(const MolecularGraph& graph);

/// Throws Error with the violation when validate() fails.
void require_valid(const MolecularGraph& graph);

/// G^pi with A^pi[pi(i), pi(j)] = A[i, j] and likewise for X and W.
MolecularGraph apply_permutation(const MolecularGraph& graph, const Permutation& perm);

/// Row permutation of a node-indexed matrix: out.row(pi(i)) = in.row(i).
Matrix permute_node_rows(const Matrix& rows, const Permutation& perm);
/// Row permutation of a pair-indexed matrix with rows i*n+j.
Matrix permute_pair_rows(const Matrix& rows, const Permutation& perm);
/// Symmetric permutation of an n x n matrix.
Matrix permute_square(const Matrix& square, const Permutation& perm);

/// The node couple (x_i, {{w_ij : j != i}}) with the multiset sorted.
struct NodeTuple {
  std::vector<double> attributes;
  std::vector<std::array<double, kBondTypes>> incident;

  auto operator<=>(const NodeTuple&) const = default;
  bool operator==(const NodeTuple&) const = default;
};

NodeTuple node_tuple(const MolecularGraph& graph, int i);

}  // namespace equigan
