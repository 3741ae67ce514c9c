#pragma once

#include <map>
#include <string>

#include "equigan/gnn/params.hpp"

namespace equigan::gan {

/// Adam with bias correction. Moment buffers are created on first use per name.
class Adam {
 public:
  Adam(double learning_rate, double beta1, double beta2, double epsilon = 1e-8)
      : lr_(learning_rate), beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {}

  /// Descends along `grads`; names absent from `grads` are left untouched.
  void step(gnn::ParameterStore& params, const std::map<std::string, ad::Matrix>& grads);
  long steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, epsilon_;
  long t_ = 0;
  std::map<std::string, ad::Matrix> m_, v_;
};

/// Clamps every weight into [-limit, limit].
void clip_weights(gnn::ParameterStore& params, double limit);

}  // namespace equigan::gan
