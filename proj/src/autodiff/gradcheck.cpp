#include "equigan/autodiff/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace equigan::ad {

namespace {

struct Probe {
  double value;
  std::uint64_t kinks;
};

Probe evaluate(const ScalarFn& f, const Matrix& x) {
  KinkMonitor monitor;
  const double v = f(Tensor(x)).item();
  return {v, monitor.signature()};
}

}  // namespace

GradCheckReport gradient_check(const ScalarFn& f, const Matrix& x, double step) {
  if (!(step > 0.0)) throw Error(ErrorCode::ShapeMismatch, "gradient_check step must be positive");
  Tape tape;
  Tensor input = tape.variable(x);
  Tensor root = f(input);
  if (root.size() != 1) throw Error(ErrorCode::NonScalarRoot, "gradient_check needs a scalar function");
  const Matrix analytic = tape.gradient(root, {input}).front().value();
  const std::uint64_t base = evaluate(f, x).kinks;

  GradCheckReport report;
  Matrix probe = x;
  for (Index k = 0; k < x.size(); ++k) {
    const double orig = probe.data()[k];
    probe.data()[k] = orig + step;
    const Probe plus = evaluate(f, probe);
    probe.data()[k] = orig - step;
    const Probe minus = evaluate(f, probe);
    probe.data()[k] = orig;
    if (plus.kinks != base || minus.kinks != base) {
      report.nonsmooth.push_back(k);
      continue;
    }
    const double numeric = (plus.value - minus.value) / (2.0 * step);
    const double a = analytic.data()[k];
    const double err = std::abs(a - numeric) / std::max({1.0, std::abs(a), std::abs(numeric)});
    ++report.checked;
    if (report.worst < 0 || err > report.max_rel_error) {
      report.max_rel_error = err;
      report.worst = k;
    }
  }
  return report;
}

}  // namespace equigan::ad
