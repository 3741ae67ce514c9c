#include "equigan/io/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "equigan/chem/smiles.hpp"

namespace equigan::io {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  return out;
}

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::IoError, "malformed dataset: " + what); }

template <typename T>
T read_value(std::istream& in, const char* what) {
  T v{};
  if (!(in >> v)) malformed(std::string("expected ") + what);
  return v;
}

void expect_word(std::istream& in, const std::string& word) {
  std::string got;
  if (!(in >> got) || got != word) malformed("expected '" + word + "', got '" + got + "'");
}

}  // namespace

std::vector<Matrix> Dataset::skeletons() const {
  std::vector<Matrix> out;
  out.reserve(graphs.size());
  for (const auto& g : graphs) out.push_back(g.A());
  return out;
}

std::vector<int> Dataset::node_counts() const {
  std::vector<int> out;
  out.reserve(graphs.size());
  for (const auto& g : graphs) out.push_back(g.n());
  return out;
}

metrics::CertificateSet Dataset::certificates() const {
  metrics::CertificateSet out;
  for (const auto& g : graphs) out.insert(chem::canonical_certificate(g));
  return out;
}

std::vector<SmilesLine> read_smiles_lines(std::istream& in) {
  std::vector<SmilesLine> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    out.push_back({number, text});
  }
  return out;
}

std::vector<SmilesLine> read_smiles_file(const std::string& path) {
  auto in = open_in(path);
  return read_smiles_lines(in);
}

Dataset preprocess(const std::vector<SmilesLine>& lines, int max_atoms, PreprocessReport& report,
                   const chem::ValenceTable& table) {
  report = PreprocessReport{};
  report.lines = lines.size();
  std::vector<chem::ParsedMolecule> kept;
  auto skip = [&](const SmilesLine& line, const std::string& reason, const std::string& message) {
    ++report.skipped[reason];
    report.details.emplace_back(line.number, line.text + ": " + message);
  };
  // Permissive vocabulary used only to run check_valence on candidates.
  auto scratch = std::make_shared<AtomVocab>();
  for (const auto& line : lines) {
    chem::ParsedMolecule mol;
    try {
      mol = chem::parse_smiles(line.text, table);
      if (static_cast<int>(mol.atoms.size()) > max_atoms) {
        skip(line, "TooManyAtoms", std::to_string(mol.atoms.size()) + " heavy atoms");
        continue;
      }
      for (const auto& atom : mol.atoms) scratch->add(atom);
      if (!chem::check_valence(chem::to_graph(mol, scratch), table)) {
        skip(line, "InvalidMolecule", "fails the valence, aromatic-ring or connectivity check");
        continue;
      }
    } catch (const Error& e) {
      skip(line, std::string(to_string(e.code())), e.what());
      continue;
    }
    kept.push_back(std::move(mol));
  }
  std::set<AtomDescriptor> descriptors;
  for (const auto& mol : kept) descriptors.insert(mol.atoms.begin(), mol.atoms.end());
  auto vocab = std::make_shared<const AtomVocab>(std::vector<AtomDescriptor>(descriptors.begin(), descriptors.end()));
  Dataset dataset{vocab, {}};
  for (const auto& mol : kept) dataset.graphs.push_back(chem::to_graph(mol, vocab));
  report.kept = dataset.graphs.size();
  return dataset;
}

void write_vocab(std::ostream& out, const AtomVocab& vocab) {
  for (const auto& atom : vocab.entries())
    out << atom.element << ' ' << atom.formal_charge << ' ' << atom.explicit_h << '\n';
}

AtomVocab read_vocab(std::istream& in) {
  std::vector<AtomDescriptor> entries;
  AtomDescriptor atom;
  while (in >> atom.element >> atom.formal_charge >> atom.explicit_h) entries.push_back(atom);
  if (!in.eof()) malformed("bad vocabulary line");
  return AtomVocab(entries);
}

void write_dataset(std::ostream& out, const Dataset& dataset) {
  out << "equigan-dataset 1\n";
  out << "vocab " << dataset.vocab->size() << '\n';
  write_vocab(out, *dataset.vocab);
  out << "graphs " << dataset.graphs.size() << '\n';
  for (const auto& g : dataset.graphs) {
    out << g.n();
    for (int i = 0; i < g.n(); ++i) out << ' ' << g.atom_type(i);
    const auto edges = g.edges();
    out << ' ' << edges.size();
    for (const auto& e : edges) out << ' ' << e.i << ' ' << e.j << ' ' << static_cast<int>(e.type);
    out << '\n';
  }
}

Dataset read_dataset(std::istream& in) {
  expect_word(in, "equigan-dataset");
  if (read_value<int>(in, "version") != 1) malformed("unsupported version");
  expect_word(in, "vocab");
  const int k = read_value<int>(in, "vocab size");
  std::vector<AtomDescriptor> entries;
  for (int v = 0; v < k; ++v) {
    AtomDescriptor atom;
    atom.element = read_value<std::string>(in, "element");
    atom.formal_charge = read_value<int>(in, "charge");
    atom.explicit_h = read_value<int>(in, "hydrogens");
    entries.push_back(atom);
  }
  Dataset dataset{std::make_shared<const AtomVocab>(entries), {}};
  expect_word(in, "graphs");
  const auto m = read_value<std::size_t>(in, "graph count");
  for (std::size_t g = 0; g < m; ++g) {
    const int n = read_value<int>(in, "node count");
    if (n < 1) malformed("graph with no nodes");
    std::vector<int> types(static_cast<std::size_t>(n));
    for (auto& t : types) t = read_value<int>(in, "atom type");
    const auto e = read_value<std::size_t>(in, "edge count");
    std::vector<MolecularGraph::Edge> edges;
    for (std::size_t q = 0; q < e; ++q) {
      const int i = read_value<int>(in, "edge end");
      const int j = read_value<int>(in, "edge end");
      const int t = read_value<int>(in, "bond type");
      if (t < 0 || t >= kBondTypes) malformed("bond type out of range");
      edges.push_back({i, j, static_cast<BondType>(t)});
    }
    MolecularGraph graph = MolecularGraph::from_edges(types, edges, dataset.vocab);
    require_valid(graph);
    dataset.graphs.push_back(std::move(graph));
  }
  return dataset;
}

void save_dataset(const std::string& path, const Dataset& dataset) {
  auto out = open_out(path);
  write_dataset(out, dataset);
  if (!out) throw Error(ErrorCode::IoError, "write to '" + path + "' failed");
}

Dataset load_dataset(const std::string& path) {
  auto in = open_in(path);
  return read_dataset(in);
}

void save_certificates(const std::string& path, const metrics::CertificateSet& certificates) {
  std::vector<std::string> hex;
  for (const auto& c : certificates) hex.push_back(c.hex());
  std::sort(hex.begin(), hex.end());
  auto out = open_out(path);
  for (const auto& h : hex) out << h << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write to '" + path + "' failed");
}

metrics::CertificateSet load_certificates(const std::string& path) {
  auto in = open_in(path);
  metrics::CertificateSet out;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (!line.empty()) out.insert(chem::Certificate::from_hex(line));
  }
  return out;
}

void save_generated(const std::string& path, const std::vector<MolecularGraph>& graphs,
                    const chem::ValenceTable& table) {
  auto out = open_out(path);
  for (const auto& g : graphs) {
    const bool valid = !validate(g) && chem::check_valence(g, table);
    std::string smiles;
    try {
      smiles = chem::write_smiles(g, table);
    } catch (const Error&) {
      if (valid) throw;
    }
    out << (valid ? "" : "!") << smiles << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "write to '" + path + "' failed");
}

std::vector<std::optional<chem::Certificate>> load_generated(const std::string& path,
                                                             const chem::ValenceTable& table) {
  auto in = open_in(path);
  std::vector<std::optional<chem::Certificate>> out;
  auto vocab = std::make_shared<AtomVocab>();
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line[0] == '!') {
      out.emplace_back();
      continue;
    }
    try {
      const auto mol = chem::parse_smiles(line, table);
      for (const auto& atom : mol.atoms) vocab->add(atom);
      out.push_back(metrics::valid_certificate(chem::to_graph(mol, vocab), table));
    } catch (const Error&) {
      out.emplace_back();
    }
  }
  return out;
}

}  // namespace equigan::io
