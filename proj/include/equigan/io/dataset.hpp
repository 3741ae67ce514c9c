#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "equigan/chem/valence.hpp"
#include "equigan/graph.hpp"
#include "equigan/metrics/metrics.hpp"

namespace equigan::io {

struct Dataset {
  std::shared_ptr<const AtomVocab> vocab;
  std::vector<MolecularGraph> graphs;

  std::vector<Matrix> skeletons() const;
  std::vector<int> node_counts() const;
  metrics::CertificateSet certificates() const;
};

struct SmilesLine {
  std::size_t number;  // 1-based line number in the source
  std::string text;
};

/// Non-empty lines with surrounding whitespace trimmed; `#` lines are skipped.
std::vector<SmilesLine> read_smiles_lines(std::istream& in);
std::vector<SmilesLine> read_smiles_file(const std::string& path);

struct PreprocessReport {
  std::size_t lines = 0;
  std::size_t kept = 0;
  /// Skip count per error code name.
  std::map<std::string, std::size_t> skipped;
  /// (line number, message) for every skipped line.
  std::vector<std::pair<std::size_t, std::string>> details;

  std::size_t skipped_total() const { return lines - kept; }
};

/// Parses every line, drops molecules with more than `max_atoms` heavy atoms
/// or failing check_valence, and encodes the rest against a vocabulary built
/// from the kept molecules (descriptors in sorted order).
Dataset preprocess(const std::vector<SmilesLine>& lines, int max_atoms, PreprocessReport& report,
                   const chem::ValenceTable& table = chem::ValenceTable::standard());

void write_dataset(std::ostream& out, const Dataset& dataset);
Dataset read_dataset(std::istream& in);
void save_dataset(const std::string& path, const Dataset& dataset);
Dataset load_dataset(const std::string& path);

/// One `element charge hydrogens` line per entry, in index order.
void write_vocab(std::ostream& out, const AtomVocab& vocab);
AtomVocab read_vocab(std::istream& in);

/// One hex certificate per line, sorted.
void save_certificates(const std::string& path, const metrics::CertificateSet& certificates);
metrics::CertificateSet load_certificates(const std::string& path);

/// Generated-molecule file: one SMILES per line, invalid molecules prefixed
/// with `!`.
void save_generated(const std::string& path, const std::vector<MolecularGraph>& graphs,
                    const chem::ValenceTable& table = chem::ValenceTable::standard());

/// Reads a generated file back into per-molecule certificates (nullopt for
/// `!` lines and lines that do not parse to a valid molecule).
std::vector<std::optional<chem::Certificate>> load_generated(const std::string& path,
                                                             const chem::ValenceTable& table = chem::ValenceTable::standard());

}  // namespace equigan::io
