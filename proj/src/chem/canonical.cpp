#include "equigan/chem/canonical.hpp"

#include <algorithm>
#include <numeric>

namespace equigan::chem {

namespace {

using Coloring = std::vector<int>;

int bond_code(const MolecularGraph& g, int i, int j) {
  return g.has_edge(i, j) ? 1 + static_cast<int>(g.bond(i, j)) : 0;
}

/// Relabels arbitrary sortable keys to dense ranks 0..k-1 in key order.
template <typename Key>
Coloring rank_keys(const std::vector<Key>& keys, int* distinct) {
  const int n = static_cast<int>(keys.size());
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return keys[a] < keys[b]; });
  Coloring out(static_cast<std::size_t>(n));
  int rank = -1;
  for (int p = 0; p < n; ++p) {
    if (p == 0 || keys[idx[p - 1]] < keys[idx[p]]) ++rank;
    out[idx[p]] = rank;
  }
  if (distinct) *distinct = rank + 1;
  return out;
}

Coloring initial_colors(const MolecularGraph& g) {
  std::vector<AtomDescriptor> keys;
  for (int i = 0; i < g.n(); ++i) keys.push_back(g.atom(i));
  return rank_keys(keys, nullptr);
}

Coloring refine(const MolecularGraph& g, Coloring colors) {
  using Signature = std::pair<int, std::vector<std::pair<int, int>>>;
  int count = 0;
  colors = rank_keys(colors, &count);
  while (true) {
    std::vector<Signature> sig(colors.size());
    for (int i = 0; i < g.n(); ++i) {
      sig[i].first = colors[i];
      for (int j = 0; j < g.n(); ++j)
        if (j != i && g.has_edge(i, j)) sig[i].second.emplace_back(colors[j], bond_code(g, i, j));
      std::sort(sig[i].second.begin(), sig[i].second.end());
    }
    int next_count = 0;
    Coloring next = rank_keys(sig, &next_count);
    if (next_count == count) return next;
    colors = std::move(next);
    count = next_count;
  }
}

Coloring individualize(const Coloring& colors, int v) {
  std::vector<int> keys(colors.size());
  for (std::size_t u = 0; u < colors.size(); ++u)
    keys[u] = 2 * colors[u] + ((static_cast<int>(u) != v && colors[u] == colors[v]) ? 1 : 0);
  return rank_keys(keys, nullptr);
}

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(static_cast<std::size_t>(n)) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(int a, int b) { parent_[find(a)] = find(b); }

 private:
  std::vector<int> parent_;
};

class Search {
 public:
  explicit Search(const MolecularGraph& g) : g_(g) {}

  CanonicalForm run() {
    std::vector<int> prefix;
    descend(initial_colors(g_), prefix);
    return CanonicalForm{Certificate{best_}, best_order_};
  }

 private:
  void descend(Coloring colors, std::vector<int>& prefix) {
    colors = refine(g_, std::move(colors));
    const int n = g_.n();
    std::vector<int> cell_size(static_cast<std::size_t>(n), 0);
    for (int c : colors) ++cell_size[c];
    int target = -1;
    for (int c = 0; c < n; ++c)
      if (cell_size[c] > 1) {
        target = c;
        break;
      }
    if (target < 0) {
      leaf(colors);
      return;
    }
    std::vector<int> explored;
    for (int v = 0; v < n; ++v) {
      if (colors[v] != target || equivalent_to_explored(v, explored, prefix)) continue;
      explored.push_back(v);
      prefix.push_back(v);
      descend(individualize(colors, v), prefix);
      prefix.pop_back();
    }
  }

  void leaf(const Coloring& colors) {
    std::vector<int> order(colors.size());
    for (std::size_t v = 0; v < colors.size(); ++v) order[colors[v]] = static_cast<int>(v);
    std::string bytes = serialize_labeling(g_, order);
    if (!have_best_ || bytes < best_) {
      best_ = std::move(bytes);
      best_order_ = std::move(order);
      have_best_ = true;
    } else if (bytes == best_) {
      std::vector<int> gamma(order.size());
      bool identity = true;
      for (std::size_t p = 0; p < order.size(); ++p) {
        gamma[best_order_[p]] = order[p];
        identity = identity && best_order_[p] == order[p];
      }
      if (!identity) automorphisms_.push_back(std::move(gamma));
    }
  }

  /// v is skipped when an automorphism fixing the prefix pointwise maps an
  /// explored sibling onto it.
  bool equivalent_to_explored(int v, const std::vector<int>& explored, const std::vector<int>& prefix) {
    if (explored.empty() || automorphisms_.empty()) return false;
    UnionFind orbits(g_.n());
    for (const auto& gamma : automorphisms_) {
      const bool fixes = std::all_of(prefix.begin(), prefix.end(), [&](int p) { return gamma[p] == p; });
      if (!fixes) continue;
      for (int u = 0; u < g_.n(); ++u) orbits.unite(u, gamma[u]);
    }
    return std::any_of(explored.begin(), explored.end(), [&](int u) { return orbits.find(u) == orbits.find(v); });
  }

  const MolecularGraph& g_;
  std::string best_;
  std::vector<int> best_order_;
  bool have_best_ = false;
  std::vector<std::vector<int>> automorphisms_;
};

}  // namespace

std::string Certificate::hex() const {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (unsigned char c : bytes) {
    out.push_back(digits[c >> 4]);
    out.push_back(digits[c & 15]);
  }
  return out;
}

Certificate Certificate::from_hex(const std::string& hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    throw Error(ErrorCode::SyntaxError, "bad hex digit in certificate");
  };
  if (hex.size() % 2 != 0) throw Error(ErrorCode::SyntaxError, "odd-length certificate hex");
  Certificate c;
  for (std::size_t i = 0; i < hex.size(); i += 2)
    c.bytes.push_back(static_cast<char>(nibble(hex[i]) * 16 + nibble(hex[i + 1])));
  return c;
}

std::string serialize_labeling(const MolecularGraph& g, const std::vector<int>& order) {
  std::string out;
  out.push_back(static_cast<char>(g.n()));
  for (int v : order) {
    const auto& atom = g.atom(v);
    out += atom.element;
    out.push_back('\0');
    out.push_back(static_cast<char>(atom.formal_charge + 8));
    out.push_back(static_cast<char>(atom.explicit_h));
  }
  for (std::size_t p = 0; p < order.size(); ++p)
    for (std::size_t q = p + 1; q < order.size(); ++q) out.push_back(static_cast<char>(bond_code(g, order[p], order[q])));
  return out;
}

CanonicalForm canonical_form(const MolecularGraph& graph) {
  require_valid(graph);
  if (graph.n() == 0) return CanonicalForm{Certificate{std::string(1, '\0')}, {}};
  return Search(graph).run();
}

Certificate canonical_certificate(const MolecularGraph& graph) { return canonical_form(graph).certificate; }

}  // namespace equigan::chem
