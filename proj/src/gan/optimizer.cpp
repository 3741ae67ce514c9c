#include "equigan/gan/optimizer.hpp"

#include <cmath>

namespace equigan::gan {

void Adam::step(gnn::ParameterStore& params, const std::map<std::string, ad::Matrix>& grads) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (const auto& [name, g] : grads) {
    ad::Matrix& w = params[name];
    if (g.rows() != w.rows() || g.cols() != w.cols())
      throw Error(ErrorCode::ShapeMismatch, "gradient for '" + name + "' has the wrong shape");
    auto [m_it, m_new] = m_.try_emplace(name, ad::Matrix::Zero(w.rows(), w.cols()));
    auto [v_it, v_new] = v_.try_emplace(name, ad::Matrix::Zero(w.rows(), w.cols()));
    ad::Matrix& m = m_it->second;
    ad::Matrix& v = v_it->second;
    m = beta1_ * m + (1.0 - beta1_) * g;
    v = beta2_ * v + (1.0 - beta2_) * g.cwiseProduct(g);
    w.array() -= lr_ * (m.array() / c1) / ((v.array() / c2).sqrt() + epsilon_);
  }
}

void clip_weights(gnn::ParameterStore& params, double limit) {
  for (const auto& name : params.names()) params[name] = params[name].cwiseMax(-limit).cwiseMin(limit);
}

}  // namespace equigan::gan
