#pragma once

#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "equigan/chem/canonical.hpp"
#include "equigan/chem/valence.hpp"
#include "equigan/graph.hpp"

namespace equigan::metrics {

using CertificateSet = std::unordered_set<chem::Certificate, chem::CertificateHash>;

/// Validity, uniqueness, novelty and the valid-unique-novel rate, in percent.
///
/// Denominators chain: uniqueness is taken among valid molecules, novelty
/// among valid unique ones, and `all` over everything generated, so
/// all = val * uniq * nov / 1e4. uniq and nov are undefined without a valid
/// molecule.
struct MetricsReport {
  std::size_t generated = 0;
  std::size_t valid = 0;
  std::size_t unique = 0;
  std::size_t novel = 0;

  double val = 0.0;
  std::optional<double> uniq;
  std::optional<double> nov;
  double all = 0.0;

  /// all == val * uniq * nov / 1e4 up to 1e-12 relative rounding.
  bool identity_holds() const;

  /// Aligned two-row text table.
  std::string table() const;
  /// key=value lines.
  std::string key_values() const;
};

/// Builds the report from raw counts.
MetricsReport from_counts(std::size_t generated, std::size_t valid, std::size_t unique, std::size_t novel);

/// Percentage `all` implied by three published rates, val * uniq * nov / 1e4.
double all_from_rates(double val, double uniq, double nov);

/// Evaluates generated molecules given the certificate of each valid one
/// (nullopt marks an invalid molecule).
MetricsReport evaluate_certificates(const std::vector<std::optional<chem::Certificate>>& generated,
                                    const CertificateSet& training);

/// A graph counts as valid when its encoding validates and check_valence holds.
MetricsReport evaluate(const std::vector<MolecularGraph>& generated, const CertificateSet& training,
                       const chem::ValenceTable& table = chem::ValenceTable::standard());

/// Certificate of `graph` when it is a valid molecule.
std::optional<chem::Certificate> valid_certificate(const MolecularGraph& graph,
                                                   const chem::ValenceTable& table = chem::ValenceTable::standard());

/// Untrained floor: uniform atom types from `vocab` and uniform bond types on
/// skeletons drawn uniformly from `skeletons`.
std::vector<MolecularGraph> random_attribution(const std::vector<Matrix>& skeletons,
                                               std::shared_ptr<const AtomVocab> vocab, Rng& rng, std::size_t samples);

MetricsReport baseline_random(const std::vector<Matrix>& skeletons, std::shared_ptr<const AtomVocab> vocab, Rng& rng,
                              std::size_t samples, const CertificateSet& training = {},
                              const chem::ValenceTable& table = chem::ValenceTable::standard());

}  // namespace equigan::metrics
