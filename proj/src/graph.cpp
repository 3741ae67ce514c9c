#include "equigan/graph.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace equigan {

double bond_order(BondType type) {
  switch (type) {
    case BondType::Single: return 1.0;
    case BondType::Double: return 2.0;
    case BondType::Triple: return 3.0;
    case BondType::Aromatic: return 1.5;
  }
  return 0.0;
}

std::string to_string(const AtomDescriptor& atom) {
  std::ostringstream out;
  out << atom.element << "(q=" << atom.formal_charge << ",h=" << atom.explicit_h << ")";
  return out.str();
}

// ---------------------------------------------------------------------------
// AtomVocab

AtomVocab::AtomVocab(std::vector<AtomDescriptor> entries, std::vector<std::string> elements)
    : elements_(std::move(elements)) {
  for (const auto& e : entries) {
    if (find(e)) throw Error(ErrorCode::InvalidDescriptor, "duplicate vocab entry " + to_string(e));
    add(e);
  }
}

void AtomVocab::check(const AtomDescriptor& atom) const {
  if (std::find(elements_.begin(), elements_.end(), atom.element) == elements_.end())
    throw Error(ErrorCode::UnknownElement, "element '" + atom.element + "' not in the element set");
  if (atom.formal_charge < -2 || atom.formal_charge > 2)
    throw Error(ErrorCode::InvalidDescriptor, "formal charge out of [-2, 2]: " + to_string(atom));
  if (atom.explicit_h < 0 || atom.explicit_h > 4)
    throw Error(ErrorCode::InvalidDescriptor, "hydrogen count out of [0, 4]: " + to_string(atom));
}

int AtomVocab::add(const AtomDescriptor& atom) {
  if (auto found = find(atom)) return *found;
  check(atom);
  const int index = size();
  entries_.push_back(atom);
  index_.emplace(atom, index);
  return index;
}

std::optional<int> AtomVocab::find(const AtomDescriptor& atom) const {
  auto it = index_.find(atom);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int AtomVocab::index_of(const AtomDescriptor& atom) const {
  if (auto found = find(atom)) return *found;
  throw Error(ErrorCode::UnknownAtomType, "atom type " + to_string(atom) + " not in vocabulary");
}

// ---------------------------------------------------------------------------
// MolecularGraph

MolecularGraph::MolecularGraph(Matrix adjacency, Matrix atoms, Matrix bonds, std::shared_ptr<const AtomVocab> vocab)
    : adjacency_(std::move(adjacency)), atoms_(std::move(atoms)), bonds_(std::move(bonds)), vocab_(std::move(vocab)) {
  if (!vocab_) throw Error(ErrorCode::SizeMismatch, "graph requires a vocabulary");
  const auto n = adjacency_.rows();
  if (adjacency_.cols() != n || atoms_.rows() != n || atoms_.cols() != vocab_->size() ||
      bonds_.rows() != n * n || bonds_.cols() != kBondTypes) {
    std::ostringstream msg;
    msg << "inconsistent shapes: A " << adjacency_.rows() << "x" << adjacency_.cols() << ", X " << atoms_.rows()
        << "x" << atoms_.cols() << " (vocab " << vocab_->size() << "), W " << bonds_.rows() << "x" << bonds_.cols();
    throw Error(ErrorCode::SizeMismatch, msg.str());
  }
}

MolecularGraph MolecularGraph::from_edges(const std::vector<int>& atom_types, const std::vector<Edge>& edges,
                                          std::shared_ptr<const AtomVocab> vocab) {
  const auto n = static_cast<Eigen::Index>(atom_types.size());
  if (!vocab) throw Error(ErrorCode::SizeMismatch, "graph requires a vocabulary");
  Matrix a = Matrix::Zero(n, n);
  Matrix x = Matrix::Zero(n, vocab->size());
  Matrix w = Matrix::Zero(n * n, kBondTypes);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int t = atom_types[static_cast<std::size_t>(i)];
    if (t < 0 || t >= vocab->size()) throw Error(ErrorCode::IndexOutOfRange, "atom type index out of range");
    x(i, t) = 1.0;
  }
  for (const auto& e : edges) {
    if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n) throw Error(ErrorCode::IndexOutOfRange, "edge endpoint out of range");
    a(e.i, e.j) = a(e.j, e.i) = 1.0;
    const int c = static_cast<int>(e.type);
    w.row(e.i * n + e.j).setZero();
    w.row(e.j * n + e.i).setZero();
    w(e.i * n + e.j, c) = 1.0;
    w(e.j * n + e.i, c) = 1.0;
  }
  return MolecularGraph(std::move(a), std::move(x), std::move(w), std::move(vocab));
}

int MolecularGraph::atom_type(int i) const {
  if (i < 0 || i >= n()) throw Error(ErrorCode::IndexOutOfRange, "node index out of range");
  Eigen::Index col = 0;
  atoms_.row(i).maxCoeff(&col);
  return static_cast<int>(col);
}

BondType MolecularGraph::bond(int i, int j) const {
  Eigen::Index col = 0;
  bonds_.row(i * n() + j).maxCoeff(&col);
  return static_cast<BondType>(col);
}

std::vector<MolecularGraph::Edge> MolecularGraph::edges() const {
  std::vector<Edge> out;
  for (int i = 0; i < n(); ++i)
    for (int j = i + 1; j < n(); ++j)
      if (has_edge(i, j)) out.push_back({i, j, bond(i, j)});
  return out;
}

bool MolecularGraph::operator==(const MolecularGraph& other) const {
  if (n() != other.n()) return false;
  if (vocab_ != other.vocab_ && vocab_->entries() != other.vocab_->entries()) return false;
  return adjacency_ == other.adjacency_ && atoms_ == other.atoms_ && bonds_ == other.bonds_;
}

// ---------------------------------------------------------------------------
// Permutation

Permutation::Permutation(std::vector<int> mapping) : mapping_(std::move(mapping)) {
  std::vector<char> seen(mapping_.size(), 0);
  for (int v : mapping_) {
    if (v < 0 || v >= size() || seen[static_cast<std::size_t>(v)])
      throw Error(ErrorCode::SizeMismatch, "mapping is not a bijection");
    seen[static_cast<std::size_t>(v)] = 1;
  }
}

Permutation Permutation::identity(int n) {
  std::vector<int> m(static_cast<std::size_t>(n));
  std::iota(m.begin(), m.end(), 0);
  return Permutation(std::move(m));
}

Permutation Permutation::random(int n, Rng& rng) {
  std::vector<int> m(static_cast<std::size_t>(n));
  std::iota(m.begin(), m.end(), 0);
  // Fisher-Yates with explicit draws so the sequence is library-independent.
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(m[static_cast<std::size_t>(i)], m[static_cast<std::size_t>(j)]);
  }
  return Permutation(std::move(m));
}

Permutation Permutation::inverse() const {
  std::vector<int> inv(mapping_.size());
  for (int i = 0; i < size(); ++i) inv[static_cast<std::size_t>(mapping_[static_cast<std::size_t>(i)])] = i;
  return Permutation(std::move(inv));
}

Permutation Permutation::compose(const Permutation& inner) const {
  if (inner.size() != size()) throw Error(ErrorCode::SizeMismatch, "composing permutations of different sizes");
  std::vector<int> out(mapping_.size());
  for (int i = 0; i < size(); ++i) out[static_cast<std::size_t>(i)] = (*this)(inner(i));
  return Permutation(std::move(out));
}

// ---------------------------------------------------------------------------
// validation

namespace {

bool is_one_hot(const Eigen::Ref<const RowVector>& row) {
  int ones = 0;
  for (Eigen::Index c = 0; c < row.size(); ++c) {
    if (row(c) == 1.0) ++ones;
    else if (row(c) != 0.0) return false;
  }
  return ones == 1;
}

GraphViolation violation(ErrorCode code, int i, int j, const std::string& what) {
  std::ostringstream msg;
  msg << what << " at (" << i << ", " << j << ")";
  return GraphViolation{code, i, j, msg.str()};
}

}  // namespace

std::optional<GraphViolation> validate(const MolecularGraph& g) {
  const int n = g.n();
  for (int i = 0; i < n; ++i) {
    if (g.A()(i, i) != 0.0) return violation(ErrorCode::SelfLoop, i, i, "nonzero diagonal in A");
    for (int j = 0; j < n; ++j) {
      const double a = g.A()(i, j);
      if (a != 0.0 && a != 1.0) return violation(ErrorCode::NonBinaryA, i, j, "A entry not in {0,1}");
      if (a != g.A()(j, i)) return violation(ErrorCode::AsymmetricA, i, j, "A not symmetric");
    }
  }
  for (int i = 0; i < n; ++i)
    if (!is_one_hot(g.X().row(i))) return violation(ErrorCode::NonOneHotRow, i, -1, "X row not one-hot");
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const auto w = g.W().row(i * n + j);
      const bool edge = g.A()(i, j) == 1.0;
      if (edge ? !is_one_hot(w) : !w.isZero(0.0))
        return violation(ErrorCode::EdgeAttrMismatch, i, j, edge ? "edge without one-hot W" : "W nonzero without edge");
      if (w != g.W().row(j * n + i)) return violation(ErrorCode::AsymmetricW, i, j, "W not symmetric");
    }
  }
  return std::nullopt;
}

void require_valid(const MolecularGraph& graph) {
  if (auto v = validate(graph)) throw Error(v->code, v->message);
}

// ---------------------------------------------------------------------------
// permutation action

Matrix permute_node_rows(const Matrix& rows, const Permutation& perm) {
  if (rows.rows() != perm.size()) throw Error(ErrorCode::SizeMismatch, "permutation size does not match rows");
  Matrix out(rows.rows(), rows.cols());
  for (int i = 0; i < perm.size(); ++i) out.row(perm(i)) = rows.row(i);
  return out;
}

Matrix permute_pair_rows(const Matrix& rows, const Permutation& perm) {
  const int n = perm.size();
  if (rows.rows() != static_cast<Eigen::Index>(n) * n)
    throw Error(ErrorCode::SizeMismatch, "permutation size does not match pair rows");
  Matrix out(rows.rows(), rows.cols());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.row(perm(i) * n + perm(j)) = rows.row(i * n + j);
  return out;
}

Matrix permute_square(const Matrix& square, const Permutation& perm) {
  const int n = perm.size();
  if (square.rows() != n || square.cols() != n) throw Error(ErrorCode::SizeMismatch, "permutation size mismatch");
  Matrix out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(perm(i), perm(j)) = square(i, j);
  return out;
}

MolecularGraph apply_permutation(const MolecularGraph& g, const Permutation& perm) {
  if (perm.size() != g.n()) throw Error(ErrorCode::SizeMismatch, "permutation size does not match node count");
  return MolecularGraph(permute_square(g.A(), perm), permute_node_rows(g.X(), perm), permute_pair_rows(g.W(), perm),
                        g.vocab_ptr());
}

NodeTuple node_tuple(const MolecularGraph& g, int i) {
  if (i < 0 || i >= g.n()) throw Error(ErrorCode::IndexOutOfRange, "node index out of range");
  NodeTuple t;
  t.attributes.resize(static_cast<std::size_t>(g.X().cols()));
  for (Eigen::Index c = 0; c < g.X().cols(); ++c) t.attributes[static_cast<std::size_t>(c)] = g.X()(i, c);
  for (int j = 0; j < g.n(); ++j) {
    if (j == i) continue;
    std::array<double, kBondTypes> w{};
    for (int c = 0; c < kBondTypes; ++c) w[static_cast<std::size_t>(c)] = g.W()(i * g.n() + j, c);
    t.incident.push_back(w);
  }
  std::sort(t.incident.begin(), t.incident.end());
  return t;
}

}  // namespace equigan
