#include "equigan/chem/smiles.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>

#include "equigan/chem/canonical.hpp"

namespace equigan::chem {

namespace {

const std::set<std::string> kKnownOtherElements = {"B", "P", "S", "I", "Cl", "Br", "Si", "Se", "H", "b", "p", "s"};

[[noreturn]] void fail(ErrorCode code, std::size_t pos, const std::string& what) {
  throw Error(code, what + " at position " + std::to_string(pos));
}

struct ParsedAtom {
  AtomDescriptor descriptor;
  bool aromatic = false;
  bool bracket = false;
  std::size_t position = 0;
};

class Parser {
 public:
  Parser(std::string_view s, const ValenceTable& table) : s_(s), table_(table) {}

  ParsedMolecule run() {
    if (s_.empty()) fail(ErrorCode::SyntaxError, 0, "empty SMILES");
    while (pos_ < s_.size()) step();
    if (!branches_.empty()) fail(ErrorCode::UnclosedBranch, branch_positions_.back(), "unclosed branch");
    if (!rings_.empty()) fail(ErrorCode::UnclosedRing, rings_.begin()->second.position, "unclosed ring " +
                                                                                           std::to_string(rings_.begin()->first));
    if (pending_) fail(ErrorCode::SyntaxError, pos_, "dangling bond");
    if (atoms_.empty()) fail(ErrorCode::SyntaxError, 0, "no atoms");
    if (prev_ < 0) fail(ErrorCode::SyntaxError, pos_, "trailing component separator");
    return finish();
  }

 private:
  struct OpenRing {
    int atom;
    std::optional<BondType> bond;
    std::size_t position;
  };

  void step() {
    const char c = s_[pos_];
    switch (c) {
      case '(':
        if (prev_ < 0) fail(ErrorCode::SyntaxError, pos_, "branch without preceding atom");
        if (pos_ + 1 < s_.size() && s_[pos_ + 1] == ')') fail(ErrorCode::SyntaxError, pos_, "empty branch");
        branches_.push_back(prev_);
        branch_positions_.push_back(pos_);
        ++pos_;
        return;
      case ')':
        if (branches_.empty()) fail(ErrorCode::SyntaxError, pos_, "unmatched ')'");
        if (pending_) fail(ErrorCode::SyntaxError, pos_, "bond before ')'");
        prev_ = branches_.back();
        branches_.pop_back();
        branch_positions_.pop_back();
        ++pos_;
        return;
      case '-': set_bond(BondType::Single); return;
      case '=': set_bond(BondType::Double); return;
      case '#': set_bond(BondType::Triple); return;
      case ':': set_bond(BondType::Aromatic); return;
      case '/':
      case '\\': fail(ErrorCode::SyntaxError, pos_, "stereo bonds are not supported");
      case '.':
        if (prev_ < 0 || pending_) fail(ErrorCode::SyntaxError, pos_, "misplaced '.'");
        if (!branches_.empty()) fail(ErrorCode::SyntaxError, pos_, "'.' inside a branch");
        prev_ = -1;
        ++pos_;
        return;
      case '%': {
        if (pos_ + 2 >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])) ||
            !std::isdigit(static_cast<unsigned char>(s_[pos_ + 2])))
          fail(ErrorCode::SyntaxError, pos_, "'%' must be followed by two digits");
        const int label = (s_[pos_ + 1] - '0') * 10 + (s_[pos_ + 2] - '0');
        ring(label, pos_);
        pos_ += 3;
        return;
      }
      case '[': bracket_atom(); return;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      ring(c - '0', pos_);
      ++pos_;
      return;
    }
    organic_atom();
  }

  void set_bond(BondType type) {
    if (pending_) fail(ErrorCode::SyntaxError, pos_, "two consecutive bond symbols");
    if (prev_ < 0) fail(ErrorCode::SyntaxError, pos_, "bond without preceding atom");
    pending_ = type;
    ++pos_;
  }

  BondType default_bond(int a, int b) const {
    return (atoms_[a].aromatic && atoms_[b].aromatic) ? BondType::Aromatic : BondType::Single;
  }

  void add_bond(int a, int b, BondType type, std::size_t at) {
    if (a == b) fail(ErrorCode::SyntaxError, at, "atom bonded to itself");
    for (const auto& e : bonds_)
      if ((e.i == a && e.j == b) || (e.i == b && e.j == a)) fail(ErrorCode::SyntaxError, at, "duplicate bond");
    bonds_.push_back({a, b, type});
  }

  void ring(int label, std::size_t at) {
    if (prev_ < 0) fail(ErrorCode::SyntaxError, at, "ring closure without preceding atom");
    auto it = rings_.find(label);
    if (it == rings_.end()) {
      rings_.emplace(label, OpenRing{prev_, pending_, at});
    } else {
      const OpenRing open = it->second;
      rings_.erase(it);
      if (open.bond && pending_ && *open.bond != *pending_)
        fail(ErrorCode::SyntaxError, at, "conflicting ring-closure bond symbols");
      const BondType type = pending_ ? *pending_ : (open.bond ? *open.bond : default_bond(open.atom, prev_));
      add_bond(open.atom, prev_, type, at);
    }
    pending_.reset();
  }

  void attach(ParsedAtom atom) {
    atoms_.push_back(std::move(atom));
    const int index = static_cast<int>(atoms_.size()) - 1;
    if (prev_ >= 0) add_bond(prev_, index, pending_ ? *pending_ : default_bond(prev_, index), atoms_.back().position);
    pending_.reset();
    prev_ = index;
  }

  void organic_atom() {
    const std::size_t at = pos_;
    const char c = s_[pos_];
    ParsedAtom atom;
    atom.position = at;
    if (pos_ + 1 < s_.size()) {
      const std::string two(s_.substr(pos_, 2));
      if (two == "Cl" || two == "Br" || two == "Si" || two == "Se") fail(ErrorCode::UnknownElement, at, "element " + two);
    }
    switch (c) {
      case 'C': case 'N': case 'O': case 'F':
        atom.descriptor.element = std::string(1, c);
        break;
      case 'c': case 'n': case 'o':
        atom.descriptor.element = std::string(1, static_cast<char>(std::toupper(c)));
        atom.aromatic = true;
        break;
      default:
        if (kKnownOtherElements.count(std::string(1, c))) fail(ErrorCode::UnknownElement, at, std::string("element ") + c);
        fail(ErrorCode::SyntaxError, at, std::string("unexpected character '") + c + "'");
    }
    ++pos_;
    attach(std::move(atom));
  }

  void bracket_atom() {
    const std::size_t at = pos_;
    ++pos_;
    auto peek = [&]() -> char { return pos_ < s_.size() ? s_[pos_] : '\0'; };
    if (std::isdigit(static_cast<unsigned char>(peek()))) fail(ErrorCode::SyntaxError, pos_, "isotopes are not supported");
    ParsedAtom atom;
    atom.position = at;
    atom.bracket = true;
    // Element symbol: uppercase letter with optional lowercase, or aromatic lowercase.
    std::string symbol;
    if (std::isupper(static_cast<unsigned char>(peek()))) {
      symbol.push_back(peek());
      ++pos_;
      if (std::islower(static_cast<unsigned char>(peek())) && peek() != 'c' && peek() != 'n' && peek() != 'o') {
        symbol.push_back(peek());
        ++pos_;
      }
    } else if (std::islower(static_cast<unsigned char>(peek()))) {
      symbol.push_back(peek());
      ++pos_;
    } else {
      fail(ErrorCode::SyntaxError, pos_, "missing element in bracket atom");
    }
    if (symbol == "c" || symbol == "n" || symbol == "o") {
      atom.aromatic = true;
      symbol[0] = static_cast<char>(std::toupper(symbol[0]));
    } else if (symbol != "C" && symbol != "N" && symbol != "O" && symbol != "F") {
      fail(ErrorCode::UnknownElement, at, "element " + symbol);
    }
    atom.descriptor.element = symbol;
    if (peek() == '@') fail(ErrorCode::SyntaxError, pos_, "chirality is not supported");
    if (peek() == 'H') {
      ++pos_;
      int h = 1;
      if (std::isdigit(static_cast<unsigned char>(peek()))) {
        h = peek() - '0';
        ++pos_;
      }
      atom.descriptor.explicit_h = h;
    }
    if (peek() == '+' || peek() == '-') {
      const char sign = peek();
      int magnitude = 0;
      while (peek() == sign) {
        ++magnitude;
        ++pos_;
      }
      if (magnitude == 1 && std::isdigit(static_cast<unsigned char>(peek()))) {
        magnitude = peek() - '0';
        ++pos_;
      }
      atom.descriptor.formal_charge = sign == '+' ? magnitude : -magnitude;
    }
    if (peek() != ']') fail(ErrorCode::SyntaxError, pos_, "expected ']'");
    ++pos_;
    if (atom.descriptor.formal_charge < -2 || atom.descriptor.formal_charge > 2)
      fail(ErrorCode::SyntaxError, at, "formal charge outside [-2, 2]");
    if (atom.descriptor.explicit_h > 4) fail(ErrorCode::SyntaxError, at, "more than 4 hydrogens");
    attach(std::move(atom));
  }

  ParsedMolecule finish() {
    std::vector<double> sums(atoms_.size(), 0.0);
    for (const auto& e : bonds_) {
      sums[e.i] += bond_order(e.type);
      sums[e.j] += bond_order(e.type);
    }
    ParsedMolecule mol;
    for (std::size_t a = 0; a < atoms_.size(); ++a) {
      AtomDescriptor d = atoms_[a].descriptor;
      if (!atoms_[a].bracket) {
        auto h = table_.implicit_hydrogens(d.element, d.formal_charge, sums[a]);
        if (!h) fail(ErrorCode::ValenceOverflow, atoms_[a].position, "no allowed valence for " + d.element);
        d.explicit_h = *h;
      }
      mol.atoms.push_back(d);
    }
    mol.bonds = bonds_;
    return mol;
  }

  std::string_view s_;
  const ValenceTable& table_;
  std::size_t pos_ = 0;
  int prev_ = -1;
  std::optional<BondType> pending_;
  std::vector<int> branches_;
  std::vector<std::size_t> branch_positions_;
  std::map<int, OpenRing> rings_;
  std::vector<ParsedAtom> atoms_;
  std::vector<MolecularGraph::Edge> bonds_;
};

// ---------------------------------------------------------------------------
// writer

class Writer {
 public:
  Writer(const MolecularGraph& g, const ValenceTable& table) : g_(g), table_(table) {
    const auto order = canonical_form(g).order;
    rank_.resize(order.size());
    for (std::size_t p = 0; p < order.size(); ++p) rank_[order[p]] = static_cast<int>(p);
    aromatic_.assign(static_cast<std::size_t>(g.n()), false);
    for (const auto& e : g.edges())
      if (e.type == BondType::Aromatic) aromatic_[e.i] = aromatic_[e.j] = true;
    for (int v = 0; v < g.n(); ++v)
      if (g.atom(v).element == "F") aromatic_[v] = false;
    by_rank_ = order;
  }

  std::string run() {
    const int n = g_.n();
    visited_.assign(static_cast<std::size_t>(n), false);
    children_.assign(static_cast<std::size_t>(n), {});
    ring_bonds_.assign(static_cast<std::size_t>(n), {});
    std::vector<std::pair<int, int>> closures;
    std::vector<int> roots;
    for (int v : by_rank_) {
      if (visited_[v]) continue;
      roots.push_back(v);
      plan(v, -1, closures);
    }
    std::string out;
    for (std::size_t r = 0; r < roots.size(); ++r) {
      if (r > 0) out.push_back('.');
      emit(roots[r], out);
    }
    return out;
  }

 private:
  std::vector<int> neighbours_by_rank(int v) const {
    std::vector<int> nb;
    for (int u = 0; u < g_.n(); ++u)
      if (u != v && g_.has_edge(v, u)) nb.push_back(u);
    std::sort(nb.begin(), nb.end(), [&](int a, int b) { return rank_[a] < rank_[b]; });
    return nb;
  }

  void plan(int v, int parent, std::vector<std::pair<int, int>>& closures) {
    visited_[v] = true;
    order_.push_back(v);
    for (int u : neighbours_by_rank(v)) {
      if (u == parent) continue;
      if (!visited_[u]) {
        children_[v].push_back(u);
        plan(u, v, closures);
      } else if (!seen_edge(u, v)) {
        // Back edge to an ancestor: ring bond opened at u, closed at v.
        closures.emplace_back(u, v);
        ring_bonds_[u].push_back({v, true});
        ring_bonds_[v].push_back({u, false});
      }
    }
  }

  bool seen_edge(int a, int b) {
    const auto key = std::minmax(a, b);
    return !ring_edges_.insert(key).second;
  }

  std::string bond_symbol(int a, int b) const {
    switch (g_.bond(a, b)) {
      case BondType::Single: return (aromatic_[a] && aromatic_[b]) ? "-" : "";
      case BondType::Double: return "=";
      case BondType::Triple: return "#";
      case BondType::Aromatic: return (aromatic_[a] && aromatic_[b]) ? "" : ":";
    }
    return "";
  }

  std::string atom_text(int v) const {
    const auto& atom = g_.atom(v);
    std::string symbol = atom.element;
    if (aromatic_[v]) symbol[0] = static_cast<char>(std::tolower(symbol[0]));
    const auto implicit = table_.implicit_hydrogens(atom.element, atom.formal_charge, bond_order_sum(g_, v));
    if (atom.formal_charge == 0 && implicit && *implicit == atom.explicit_h) return symbol;
    std::string out = "[" + symbol;
    if (atom.explicit_h > 0) out += "H" + (atom.explicit_h > 1 ? std::to_string(atom.explicit_h) : std::string());
    if (atom.formal_charge != 0) {
      out.push_back(atom.formal_charge > 0 ? '+' : '-');
      if (std::abs(atom.formal_charge) > 1) out += std::to_string(std::abs(atom.formal_charge));
    }
    return out + "]";
  }

  static std::string ring_label(int label) {
    if (label < 10) return std::to_string(label);
    return "%" + std::to_string(label);
  }

  void emit(int v, std::string& out) {
    out += atom_text(v);
    // Closings first: their labels were opened at ancestors.
    for (const auto& [other, opening] : ring_bonds_[v]) {
      if (opening) continue;
      const auto key = std::minmax(v, other);
      out += ring_label(labels_.at(key));
      free_.insert(labels_.at(key));
    }
    for (const auto& [other, opening] : ring_bonds_[v]) {
      if (!opening) continue;
      const int label = allocate();
      labels_[std::minmax(v, other)] = label;
      out += bond_symbol(v, other) + ring_label(label);
    }
    const auto& kids = children_[v];
    for (std::size_t k = 0; k < kids.size(); ++k) {
      const bool branch = k + 1 < kids.size();
      if (branch) out.push_back('(');
      out += bond_symbol(v, kids[k]);
      emit(kids[k], out);
      if (branch) out.push_back(')');
    }
  }

  int allocate() {
    if (!free_.empty()) {
      const int label = *free_.begin();
      free_.erase(free_.begin());
      return label;
    }
    if (next_label_ > 99) throw Error(ErrorCode::UnsupportedGraph, "more than 99 simultaneous ring closures");
    return next_label_++;
  }

  const MolecularGraph& g_;
  const ValenceTable& table_;
  std::vector<int> rank_;
  std::vector<int> by_rank_;
  std::vector<bool> aromatic_;
  std::vector<bool> visited_;
  std::vector<int> order_;
  std::vector<std::vector<int>> children_;
  std::vector<std::vector<std::pair<int, bool>>> ring_bonds_;
  std::set<std::pair<int, int>> ring_edges_;
  std::map<std::pair<int, int>, int> labels_;
  std::set<int> free_;
  int next_label_ = 1;
};

}  // namespace

ParsedMolecule parse_smiles(std::string_view smiles, const ValenceTable& table) { return Parser(smiles, table).run(); }

MolecularGraph to_graph(const ParsedMolecule& molecule, std::shared_ptr<const AtomVocab> vocab) {
  std::vector<int> types;
  for (const auto& atom : molecule.atoms) types.push_back(vocab->index_of(atom));
  return MolecularGraph::from_edges(types, molecule.bonds, std::move(vocab));
}

MolecularGraph parse_smiles(std::string_view smiles, std::shared_ptr<const AtomVocab> vocab, const ValenceTable& table) {
  return to_graph(parse_smiles(smiles, table), std::move(vocab));
}

std::string write_smiles(const MolecularGraph& graph, const ValenceTable& table) {
  require_valid(graph);
  if (graph.n() == 0) throw Error(ErrorCode::UnsupportedGraph, "empty graph");
  return Writer(graph, table).run();
}

}  // namespace equigan::chem
