#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "equigan/chem/canonical.hpp"
#include "equigan/graph.hpp"

namespace equigan::verify {

/// Draws a latent set for n nodes from `rng` and maps it to a labeled graph.
using LatentGraphGenerator = std::function<MolecularGraph(int n, Rng& rng)>;

struct ClassCounts {
  chem::Certificate certificate;
  std::size_t total = 0;
  /// Distinct labeled graphs in the class, n!/|Aut|.
  std::size_t labelings = 0;
  /// Observed count per labeled graph (keyed by its serialization).
  std::map<std::string, std::size_t> counts;
  double expected = 0.0;
  bool excluded = false;
};

struct EquiprobabilityReport {
  std::size_t samples = 0;
  double chi_square = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
  std::vector<ClassCounts> classes;
  std::size_t excluded = 0;

  bool passes(double alpha = 0.01) const { return p_value > alpha; }
  std::string text() const;
};

/// Number of distinct labeled graphs obtained by relabeling `graph` (n <= 8).
std::size_t distinct_labelings(const MolecularGraph& graph);

/// Pearson chi-square of the per-labeling counts against the uniform
/// distribution within each isomorphism class, summed over classes. Classes
/// whose expected count per labeling is below `min_expected` are excluded;
/// TooFewSamples is thrown when that leaves no class with more than one
/// labeling while some were excluded.
EquiprobabilityReport equiprobability_test(const LatentGraphGenerator& generator, int n, std::size_t samples, Rng& rng,
                                           double min_expected = 5.0);

/// The same statistic over an already generated list of same-size graphs.
EquiprobabilityReport equiprobability_statistic(const std::vector<MolecularGraph>& graphs, double min_expected = 5.0);

}  // namespace equigan::verify
