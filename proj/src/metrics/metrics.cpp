#include "equigan/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace equigan::metrics {

namespace {

std::string percent(const std::optional<double>& v) {
  if (!v) return "undef";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", *v);
  return buf;
}

}  // namespace

MetricsReport from_counts(std::size_t generated, std::size_t valid, std::size_t unique, std::size_t novel) {
  if (generated == 0) throw Error(ErrorCode::EmptyInput, "no generated molecules");
  if (valid > generated || unique > valid || novel > unique)
    throw Error(ErrorCode::EmptyInput, "inconsistent metric counts");
  MetricsReport r;
  r.generated = generated;
  r.valid = valid;
  r.unique = unique;
  r.novel = novel;
  r.val = 100.0 * static_cast<double>(valid) / static_cast<double>(generated);
  if (valid > 0) {
    r.uniq = 100.0 * static_cast<double>(unique) / static_cast<double>(valid);
    r.nov = 100.0 * static_cast<double>(novel) / static_cast<double>(unique);
  }
  r.all = 100.0 * static_cast<double>(novel) / static_cast<double>(generated);
  return r;
}

double all_from_rates(double val, double uniq, double nov) { return val * uniq * nov / 1e4; }

bool MetricsReport::identity_holds() const {
  if (!uniq || !nov) return valid == 0 && all == 0.0;
  // In exact arithmetic the product telescopes to 100 * novel / generated.
  return std::abs(all - all_from_rates(val, *uniq, *nov)) <= 1e-12 * std::max(1.0, all);
}

std::string MetricsReport::table() const {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%10s %10s %10s %10s\n%10s %10s %10s %10s\n", "val", "uniq", "nov", "all",
                percent(val).c_str(), percent(uniq).c_str(), percent(nov).c_str(), percent(all).c_str());
  return buf;
}

std::string MetricsReport::key_values() const {
  std::ostringstream out;
  out.precision(17);
  auto opt = [](const std::optional<double>& v) {
    std::ostringstream s;
    s.precision(17);
    if (v) s << *v;
    else s << "undef";
    return s.str();
  };
  out << "generated=" << generated << "\nvalid=" << valid << "\nunique=" << unique << "\nnovel=" << novel
      << "\nval=" << val << "\nuniq=" << opt(uniq) << "\nnov=" << opt(nov) << "\nall=" << all << "\n";
  return out.str();
}

MetricsReport evaluate_certificates(const std::vector<std::optional<chem::Certificate>>& generated,
                                    const CertificateSet& training) {
  if (generated.empty()) throw Error(ErrorCode::EmptyInput, "no generated molecules");
  std::size_t valid = 0;
  CertificateSet distinct;
  for (const auto& c : generated) {
    if (!c) continue;
    ++valid;
    distinct.insert(*c);
  }
  std::size_t novel = 0;
  for (const auto& c : distinct)
    if (!training.count(c)) ++novel;
  return from_counts(generated.size(), valid, distinct.size(), novel);
}

std::optional<chem::Certificate> valid_certificate(const MolecularGraph& graph, const chem::ValenceTable& table) {
  if (validate(graph) || !chem::check_valence(graph, table)) return std::nullopt;
  return chem::canonical_certificate(graph);
}

MetricsReport evaluate(const std::vector<MolecularGraph>& generated, const CertificateSet& training,
                       const chem::ValenceTable& table) {
  std::vector<std::optional<chem::Certificate>> certs;
  certs.reserve(generated.size());
  for (const auto& g : generated) certs.push_back(valid_certificate(g, table));
  return evaluate_certificates(certs, training);
}

std::vector<MolecularGraph> random_attribution(const std::vector<Matrix>& skeletons,
                                               std::shared_ptr<const AtomVocab> vocab, Rng& rng,
                                               std::size_t samples) {
  if (skeletons.empty()) throw Error(ErrorCode::EmptyInput, "no skeletons");
  if (!vocab || vocab->size() == 0) throw Error(ErrorCode::EmptyInput, "empty vocabulary");
  std::uniform_int_distribution<std::size_t> pick(0, skeletons.size() - 1);
  std::uniform_int_distribution<int> atom(0, vocab->size() - 1);
  std::uniform_int_distribution<int> bond(0, kBondTypes - 1);
  std::vector<MolecularGraph> out;
  out.reserve(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    const Matrix& A = skeletons[pick(rng)];
    const int n = static_cast<int>(A.rows());
    std::vector<int> types(static_cast<std::size_t>(n));
    for (auto& t : types) t = atom(rng);
    std::vector<MolecularGraph::Edge> edges;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (A(i, j) != 0.0) edges.push_back({i, j, static_cast<BondType>(bond(rng))});
    out.push_back(MolecularGraph::from_edges(types, edges, vocab));
  }
  return out;
}

MetricsReport baseline_random(const std::vector<Matrix>& skeletons, std::shared_ptr<const AtomVocab> vocab, Rng& rng,
                              std::size_t samples, const CertificateSet& training, const chem::ValenceTable& table) {
  return evaluate(random_attribution(skeletons, std::move(vocab), rng, samples), training, table);
}

}  // namespace equigan::metrics
