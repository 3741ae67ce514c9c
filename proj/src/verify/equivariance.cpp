#include "equigan/verify/equivariance.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace equigan::verify {

namespace {

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorCode::ShapeMismatch, "set function changed its output shape under permutation");
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

Matrix permute_rows_if(const Matrix& m, const Permutation& perm, bool pairs) {
  if (m.size() == 0 && m.rows() == 0) return m;
  return pairs ? permute_pair_rows(m, perm) : permute_node_rows(m, perm);
}

}  // namespace

std::string EquivarianceReport::text() const {
  std::ostringstream out;
  out.precision(6);
  out << "trials: " << trials << "\nmax_deviation: " << std::scientific << max_deviation << "\nworst_permutation:";
  for (int v : worst.mapping()) out << ' ' << v;
  out << '\n';
  return out.str();
}

SetInput permute(const SetInput& in, const Permutation& perm) {
  if (perm.size() != in.n) throw Error(ErrorCode::SizeMismatch, "permutation size differs from the set size");
  return SetInput{in.n, permute_rows_if(in.nodes, perm, false), permute_rows_if(in.pairs, perm, true)};
}

SetOutput permute(const SetOutput& out, const Permutation& perm) {
  return SetOutput{permute_rows_if(out.nodes, perm, false), permute_rows_if(out.pairs, perm, true), out.invariant};
}

EquivarianceReport check_equivariance(const SetFunction& f, const SetInput& input, int trials, Rng& rng) {
  EquivarianceReport report;
  report.worst = Permutation::identity(input.n);
  const SetOutput base = f(input);
  for (int t = 0; t < trials; ++t) {
    const Permutation pi = Permutation::random(input.n, rng);
    const SetOutput moved = f(permute(input, pi));
    const SetOutput expected = permute(base, pi);
    const double dev = std::max({max_abs_diff(moved.nodes, expected.nodes), max_abs_diff(moved.pairs, expected.pairs),
                                 max_abs_diff(moved.invariant, expected.invariant)});
    ++report.trials;
    if (t == 0 || dev > report.max_deviation) {
      report.max_deviation = dev;
      report.worst = pi;
    }
  }
  return report;
}

EquivarianceReport check_equivariance(const std::function<Matrix(const Matrix&)>& f, const Matrix& Z, int trials,
                                      Rng& rng) {
  SetFunction wrapped = [&f](const SetInput& in) { return SetOutput{f(in.nodes), Matrix(), Matrix()}; };
  return check_equivariance(wrapped, SetInput{static_cast<int>(Z.rows()), Z, Matrix()}, trials, rng);
}

double check_decomposition_invariance(const RowFunction& f_row, const Matrix& Z, int trials, Rng& rng) {
  const int n = static_cast<int>(Z.rows());
  if (n < 1) throw Error(ErrorCode::NEmpty, "decomposition check on an empty set");
  std::uniform_int_distribution<int> pick(0, n - 1);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const int i = pick(rng);
    std::vector<int> others;
    for (int j = 0; j < n; ++j)
      if (j != i) others.push_back(j);
    auto rows_of = [&](const std::vector<int>& order) {
      Matrix m(static_cast<Eigen::Index>(order.size()), Z.cols());
      for (std::size_t k = 0; k < order.size(); ++k) m.row(static_cast<Eigen::Index>(k)) = Z.row(order[k]);
      return m;
    };
    const RowVector reference = f_row(Z.row(i), rows_of(others));
    std::shuffle(others.begin(), others.end(), rng);
    const RowVector shuffled = f_row(Z.row(i), rows_of(others));
    worst = std::max(worst, max_abs_diff(reference, shuffled));
  }
  return worst;
}

}  // namespace equigan::verify
