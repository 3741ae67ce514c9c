#pragma once

#include <functional>
#include <vector>

#include "equigan/autodiff/tensor.hpp"

namespace equigan::ad {

struct GradCheckReport {
  /// max over checked coordinates of |analytic - numeric| / max(1, |analytic|, |numeric|).
  double max_rel_error = 0.0;
  Index worst = -1;
  /// Coordinates whose central difference straddles a non-smooth point (NonSmoothPoint).
  std::vector<Index> nonsmooth;
  Index checked = 0;
};

using ScalarFn = std::function<Tensor(const Tensor&)>;

/// Compares reverse-mode gradients of `f` at `x` against central differences.
GradCheckReport gradient_check(const ScalarFn& f, const Matrix& x, double step = 1e-5);

}  // namespace equigan::ad
