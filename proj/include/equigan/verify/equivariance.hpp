#pragma once

#include <functional>
#include <string>

#include "equigan/graph.hpp"

namespace equigan::verify {

/// Input of a set function on n elements: node-indexed rows (n x d) and
/// pair-indexed rows (n*n x e, row i*n+j). Either block may have no columns.
struct SetInput {
  int n = 0;
  Matrix nodes;
  Matrix pairs;
};

/// Equivariant node and pair outputs plus an invariant block; any may be empty.
struct SetOutput {
  Matrix nodes;
  Matrix pairs;
  Matrix invariant;
};

using SetFunction = std::function<SetOutput(const SetInput&)>;

struct EquivarianceReport {
  double max_deviation = 0.0;
  Permutation worst;
  int trials = 0;

  std::string text() const;
};

SetInput permute(const SetInput& input, const Permutation& perm);
SetOutput permute(const SetOutput& output, const Permutation& perm);

/// max over `trials` random permutations of ||f(input^pi) - f(input)^pi||_inf,
/// with invariant blocks compared unpermuted.
EquivarianceReport check_equivariance(const SetFunction& f, const SetInput& input, int trials, Rng& rng);

/// Convenience form for node-row functions Z -> Y.
EquivarianceReport check_equivariance(const std::function<Matrix(const Matrix&)>& f, const Matrix& Z, int trials,
                                      Rng& rng);

/// Row function g_i = f(z_i, Z_{-i}), with Z_{-i} given as rows.
using RowFunction = std::function<RowVector(const RowVector& z_i, const Matrix& others)>;

/// max over `trials` (random i, random ordering of Z_{-i}) of the deviation
/// from f evaluated on Z_{-i} in ascending index order.
double check_decomposition_invariance(const RowFunction& f_row, const Matrix& Z, int trials, Rng& rng);

}  // namespace equigan::verify
