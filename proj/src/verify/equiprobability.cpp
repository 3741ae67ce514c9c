#include "equigan/verify/equiprobability.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

namespace equigan::verify {

std::size_t distinct_labelings(const MolecularGraph& graph) {
  if (graph.n() > 8) throw Error(ErrorCode::SizeMismatch, "labeling enumeration limited to 8 nodes");
  std::vector<int> order(static_cast<std::size_t>(graph.n()));
  std::iota(order.begin(), order.end(), 0);
  std::set<std::string> seen;
  do {
    seen.insert(chem::serialize_labeling(graph, order));
  } while (std::next_permutation(order.begin(), order.end()));
  return seen.size();
}

EquiprobabilityReport equiprobability_statistic(const std::vector<MolecularGraph>& graphs, double min_expected) {
  if (graphs.empty()) throw Error(ErrorCode::TooFewSamples, "no samples");
  std::unordered_map<chem::Certificate, std::size_t, chem::CertificateHash> index;
  EquiprobabilityReport report;
  report.samples = graphs.size();
  for (const auto& g : graphs) {
    if (g.n() != graphs.front().n()) throw Error(ErrorCode::SizeMismatch, "samples differ in node count");
    auto cert = chem::canonical_certificate(g);
    auto [it, inserted] = index.try_emplace(cert, report.classes.size());
    if (inserted) {
      ClassCounts cls;
      cls.certificate = std::move(cert);
      cls.labelings = distinct_labelings(g);
      report.classes.push_back(std::move(cls));
    }
    ClassCounts& cls = report.classes[it->second];
    ++cls.total;
    std::vector<int> identity(static_cast<std::size_t>(g.n()));
    std::iota(identity.begin(), identity.end(), 0);
    ++cls.counts[chem::serialize_labeling(g, identity)];
  }
  std::sort(report.classes.begin(), report.classes.end(),
            [](const ClassCounts& a, const ClassCounts& b) { return a.certificate < b.certificate; });

  std::size_t tested = 0;
  for (auto& cls : report.classes) {
    cls.expected = static_cast<double>(cls.total) / static_cast<double>(cls.labelings);
    if (cls.labelings < 2) continue;
    if (cls.expected < min_expected) {
      cls.excluded = true;
      ++report.excluded;
      continue;
    }
    ++tested;
    double stat = 0.0;
    for (const auto& [key, count] : cls.counts) {
      const double d = static_cast<double>(count) - cls.expected;
      stat += d * d / cls.expected;
    }
    // Labelings never observed contribute expected^2 / expected each.
    stat += static_cast<double>(cls.labelings - cls.counts.size()) * cls.expected;
    report.chi_square += stat;
    report.dof += static_cast<double>(cls.labelings - 1);
  }
  if (tested == 0 && report.excluded > 0)
    throw Error(ErrorCode::TooFewSamples, std::to_string(report.excluded) +
                                              " isomorphism classes have fewer than the minimum expected count per labeling");
  if (report.dof > 0) {
    boost::math::chi_squared dist(report.dof);
    report.p_value = boost::math::cdf(boost::math::complement(dist, report.chi_square));
  }
  return report;
}

EquiprobabilityReport equiprobability_test(const LatentGraphGenerator& generator, int n, std::size_t samples, Rng& rng,
                                           double min_expected) {
  if (n < 1) throw Error(ErrorCode::NEmpty, "equiprobability test needs n >= 1");
  std::vector<MolecularGraph> graphs;
  graphs.reserve(samples);
  for (std::size_t s = 0; s < samples; ++s) graphs.push_back(generator(n, rng));
  return equiprobability_statistic(graphs, min_expected);
}

std::string EquiprobabilityReport::text() const {
  std::ostringstream out;
  out.precision(6);
  out << "samples: " << samples << "\nclasses: " << classes.size() << "\nexcluded_classes: " << excluded
      << "\nchi_square: " << chi_square << "\ndof: " << dof << "\np_value: " << p_value << '\n';
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const auto& cls = classes[c];
    out << "class_" << c << ": total=" << cls.total << " labelings=" << cls.labelings << " observed=" << cls.counts.size()
        << (cls.excluded ? " excluded" : "") << '\n';
  }
  return out.str();
}

}  // namespace equigan::verify
