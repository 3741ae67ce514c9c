#include "equigan/gnn/params.hpp"

#include <cmath>

namespace equigan::gnn {

void ParameterStore::add(const std::string& name, Matrix value) {
  if (contains(name)) throw Error(ErrorCode::BadConfig, "duplicate parameter " + name);
  order_.push_back(name);
  values_.emplace(name, std::move(value));
}

Matrix& ParameterStore::operator[](const std::string& name) {
  auto it = values_.find(name);
  if (it == values_.end()) throw Error(ErrorCode::BadConfig, "unknown parameter " + name);
  return it->second;
}

const Matrix& ParameterStore::operator[](const std::string& name) const {
  auto it = values_.find(name);
  if (it == values_.end()) throw Error(ErrorCode::BadConfig, "unknown parameter " + name);
  return it->second;
}

std::size_t ParameterStore::scalar_count() const {
  std::size_t total = 0;
  for (const auto& [name, m] : values_) total += static_cast<std::size_t>(m.size());
  return total;
}

bool ParameterStore::operator==(const ParameterStore& other) const {
  if (order_ != other.order_) return false;
  for (const auto& name : order_) {
    const Matrix& a = (*this)[name];
    const Matrix& b = other[name];
    if (a.rows() != b.rows() || a.cols() != b.cols() || a != b) return false;
  }
  return true;
}

Binding::Binding(const ParameterStore& store, ad::Tape* tape) : tracked_(tape != nullptr) {
  for (const auto& name : store.names())
    tensors_.emplace(name, tape ? tape->variable(store[name]) : Tensor(store[name]));
}

const Tensor& Binding::operator[](const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw Error(ErrorCode::BadConfig, "unbound parameter " + name);
  return it->second;
}

void Binding::set(const std::string& name, Tensor value) {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw Error(ErrorCode::BadConfig, "unbound parameter " + name);
  if (value.rows() != it->second.rows() || value.cols() != it->second.cols())
    throw Error(ErrorCode::ShapeMismatch, name + ": expected " + it->second.shape() + ", got " + value.shape());
  it->second = std::move(value);
}

void init_linear(ParameterStore& store, const std::string& prefix, int in, int out, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Matrix w(in, out);
  for (Eigen::Index c = 0; c < w.cols(); ++c)
    for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = dist(rng);
  Matrix b(1, out);
  for (Eigen::Index c = 0; c < b.cols(); ++c) b(0, c) = dist(rng);
  store.add(prefix + ".weight", std::move(w));
  store.add(prefix + ".bias", std::move(b));
}

}  // namespace equigan::gnn
