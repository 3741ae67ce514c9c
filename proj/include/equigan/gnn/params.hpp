#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include "equigan/autodiff/tensor.hpp"

namespace equigan::gnn {

using ad::Matrix;
using ad::Tensor;

/// Named weight matrices in insertion order.
class ParameterStore {
 public:
  void add(const std::string& name, Matrix value);
  bool contains(const std::string& name) const { return values_.count(name) != 0; }
  Matrix& operator[](const std::string& name);
  const Matrix& operator[](const std::string& name) const;
  const std::vector<std::string>& names() const { return order_; }
  std::size_t scalar_count() const;
  bool empty() const { return order_.empty(); }

  bool operator==(const ParameterStore& other) const;

 private:
  std::vector<std::string> order_;
  std::map<std::string, Matrix> values_;
};

/// Tensors for one forward pass over a ParameterStore. With a tape, every
/// parameter is a tracked leaf; without one, parameters are constants.
class Binding {
 public:
  Binding(const ParameterStore& store, ad::Tape* tape);

  const Tensor& operator[](const std::string& name) const;
  /// Rebinds one existing name, e.g. to differentiate with respect to it alone.
  void set(const std::string& name, Tensor value);
  const std::map<std::string, Tensor>& tensors() const { return tensors_; }
  bool tracked() const { return tracked_; }

 private:
  std::map<std::string, Tensor> tensors_;
  bool tracked_ = false;
};

/// Uniform(-1/sqrt(in), 1/sqrt(in)) weights and biases for an in -> out map.
void init_linear(ParameterStore& store, const std::string& prefix, int in, int out, std::mt19937_64& rng);

}  // namespace equigan::gnn
