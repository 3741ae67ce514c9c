#include "equigan/autodiff/tensor.hpp"

#include <cmath>
#include <sstream>

namespace equigan::ad {

namespace {

std::string shape_of(const Matrix& m) {
  std::ostringstream out;
  out << m.rows() << "x" << m.cols();
  return out.str();
}

[[noreturn]] void shape_error(const char* op, const Matrix& a, const Matrix& b) {
  throw Error(ErrorCode::ShapeMismatch, std::string(op) + ": " + shape_of(a) + " vs " + shape_of(b));
}

/// Tape that should record an op over `inputs`, or null for a constant result.
Tape* recording_tape(std::initializer_list<const Tensor*> inputs) {
  Tape* found = nullptr;
  for (const Tensor* t : inputs) {
    Tape* tp = t->tape();
    if (!tp) continue;
    if (found && found != tp) throw Error(ErrorCode::ForeignTape, "op mixes tensors from different tapes");
    found = tp;
  }
  return (found && found->recording()) ? found : nullptr;
}

Tape* recording_tape(const std::vector<Tensor>& inputs) {
  Tape* found = nullptr;
  for (const Tensor& t : inputs) {
    Tape* tp = t.tape();
    if (!tp) continue;
    if (found && found != tp) throw Error(ErrorCode::ForeignTape, "op mixes tensors from different tapes");
    found = tp;
  }
  return (found && found->recording()) ? found : nullptr;
}

Tensor make(Tape* tape, Matrix value, std::vector<Tensor> inputs, BackwardFn fn, const char* op) {
  if (!tape) return Tensor(std::move(value));
  return tape->record(std::move(value), std::move(inputs), std::move(fn), op);
}

Index broadcast_extent(Index a, Index b, const char* op, const Matrix& ma, const Matrix& mb) {
  if (a == b) return a;
  if (a == 1) return b;
  if (b == 1) return a;
  shape_error(op, ma, mb);
}

/// Elementwise binary op with broadcasting, evaluated left-to-right.
template <typename F>
Matrix broadcast_apply(const Matrix& a, const Matrix& b, const char* op, F f) {
  const Index rows = broadcast_extent(a.rows(), b.rows(), op, a, b);
  const Index cols = broadcast_extent(a.cols(), b.cols(), op, a, b);
  Matrix out(rows, cols);
  const bool ar = a.rows() == 1, ac = a.cols() == 1, br = b.rows() == 1, bc = b.cols() == 1;
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) out(r, c) = f(a(ar ? 0 : r, ac ? 0 : c), b(br ? 0 : r, bc ? 0 : c));
  return out;
}

double celu_derivative_value(double x, double alpha, int order) {
  if (x > 0.0) return order == 1 ? 1.0 : 0.0;
  return std::exp(x / alpha) / std::pow(alpha, order - 1);
}

/// k-th derivative of CELU (k >= 1); its own derivative is order k+1.
Tensor celu_derivative(const Tensor& a, double alpha, int order) {
  if (auto* monitor = KinkMonitor::current()) monitor->observe(a.value());
  Matrix out = a.value().unaryExpr([&](double x) { return celu_derivative_value(x, alpha, order); });
  return make(recording_tape({&a}), std::move(out), {a},
              [a, alpha, order](const Tensor&, const Tensor& g) {
                return std::vector<Tensor>{mul(g, celu_derivative(a, alpha, order + 1))};
              },
              "celu_derivative");
}

thread_local KinkMonitor* g_monitor = nullptr;

}  // namespace

// ---------------------------------------------------------------------------
// Tensor

Tensor::Tensor(Matrix value) : node_(std::make_shared<Node>()) { node_->value = std::move(value); }

Tensor Tensor::scalar(double v) { return Tensor(Matrix::Constant(1, 1, v)); }

const Matrix& Tensor::value() const {
  if (!node_) throw Error(ErrorCode::ShapeMismatch, "use of undefined tensor");
  return node_->value;
}

double Tensor::item() const {
  if (size() != 1) throw Error(ErrorCode::NonScalarRoot, "item() on tensor of shape " + shape());
  return value()(0, 0);
}

bool Tensor::requires_grad() const { return node_ && node_->tape != nullptr; }
Tape* Tensor::tape() const { return node_ ? node_->tape : nullptr; }

const Matrix* Tensor::grad() const { return (node_ && node_->grad) ? &*node_->grad : nullptr; }

std::string Tensor::shape() const { return node_ ? shape_of(node_->value) : std::string("undefined"); }

// ---------------------------------------------------------------------------
// Tape

Tape::~Tape() { detach_all(); }

void Tape::detach_all() {
  for (auto& node : nodes_) {
    node->tape = nullptr;
    node->backward = nullptr;
    node->inputs.clear();
  }
}

Tensor Tape::variable(Matrix value) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->tape = this;
  node->index = nodes_.size();
  node->op = "variable";
  nodes_.push_back(node);
  return Tensor(std::move(node));
}

Tensor Tape::record(Matrix value, std::vector<Tensor> inputs, BackwardFn backward, const char* op) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->inputs = std::move(inputs);
  node->backward = std::move(backward);
  node->tape = this;
  node->index = nodes_.size();
  node->op = op;
  nodes_.push_back(node);
  return Tensor(std::move(node));
}

std::vector<Tensor> Tape::gradient(const Tensor& root, const std::vector<Tensor>& wrt, bool create_graph) {
  if (!root.defined() || root.size() != 1)
    throw Error(ErrorCode::NonScalarRoot, "gradient root must be a scalar, got " + root.shape());
  std::vector<Tensor> result;
  result.reserve(wrt.size());
  if (root.tape() != this) {
    for (const auto& w : wrt) result.emplace_back(Matrix::Zero(w.rows(), w.cols()));
    return result;
  }

  std::optional<Pause> pause;
  if (!create_graph) pause.emplace(*this);

  const std::size_t top = root.node()->index;
  std::vector<Tensor> grads(top + 1);
  grads[top] = Tensor::scalar(1.0);
  for (std::size_t k = top + 1; k-- > 0;) {
    if (!grads[k].defined()) continue;
    // Copy: backward may append nodes and reallocate nodes_.
    std::shared_ptr<Node> node = nodes_[k];
    if (!node->backward) continue;
    std::vector<Tensor> input_grads = node->backward(Tensor(node), grads[k]);
    for (std::size_t i = 0; i < node->inputs.size() && i < input_grads.size(); ++i) {
      const Tensor& in = node->inputs[i];
      if (!input_grads[i].defined() || in.tape() != this) continue;
      Tensor& slot = grads[in.node()->index];
      slot = slot.defined() ? add(slot, input_grads[i]) : input_grads[i];
    }
  }
  for (const auto& w : wrt) {
    if (w.tape() == this && w.node()->index <= top && grads[w.node()->index].defined())
      result.push_back(grads[w.node()->index]);
    else
      result.emplace_back(Matrix::Zero(w.rows(), w.cols()));
  }
  return result;
}

void Tape::backward(const Tensor& root) {
  if (consumed_) throw Error(ErrorCode::TapeConsumed, "backward already ran on this tape; call reset()");
  std::vector<Tensor> leaves;
  for (const auto& node : nodes_)
    if (!node->backward) leaves.emplace_back(node);
  auto grads = gradient(root, leaves, false);
  for (std::size_t i = 0; i < leaves.size(); ++i) leaves[i].node()->grad = grads[i].value();
  consumed_ = true;
}

void Tape::reset() {
  detach_all();
  nodes_.clear();
  consumed_ = false;
}

// ---------------------------------------------------------------------------
// KinkMonitor

KinkMonitor::KinkMonitor() : previous_(g_monitor) { g_monitor = this; }
KinkMonitor::~KinkMonitor() { g_monitor = previous_; }
KinkMonitor* KinkMonitor::current() { return g_monitor; }

void KinkMonitor::observe(const Matrix& input) {
  for (Index i = 0; i < input.size(); ++i) {
    const double x = input.data()[i];
    const std::uint64_t sign = x > 0.0 ? 2 : (x < 0.0 ? 1 : 3);
    hash_ = (hash_ ^ sign) * 1099511628211ULL;
  }
  hash_ = (hash_ ^ 0xff) * 1099511628211ULL;
}

// ---------------------------------------------------------------------------
// primitives

IndexList make_index(std::vector<Index> idx) { return std::make_shared<const std::vector<Index>>(std::move(idx)); }

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) shape_error("matmul", a.value(), b.value());
  Matrix out = a.value() * b.value();
  return make(recording_tape({&a, &b}), std::move(out), {a, b},
              [a, b](const Tensor&, const Tensor& g) {
                Tensor ga, gb;
                if (a.requires_grad()) ga = matmul(g, transpose(b));
                if (b.requires_grad()) gb = matmul(transpose(a), g);
                return std::vector<Tensor>{ga, gb};
              },
              "matmul");
}

Tensor transpose(const Tensor& a) {
  return make(recording_tape({&a}), a.value().transpose(), {a},
              [](const Tensor&, const Tensor& g) { return std::vector<Tensor>{transpose(g)}; }, "transpose");
}

Tensor add(const Tensor& a, const Tensor& b) {
  Matrix out = (a.rows() == b.rows() && a.cols() == b.cols())
                   ? Matrix(a.value() + b.value())
                   : broadcast_apply(a.value(), b.value(), "add", [](double x, double y) { return x + y; });
  return make(recording_tape({&a, &b}), std::move(out), {a, b},
              [a, b](const Tensor&, const Tensor& g) {
                Tensor ga, gb;
                if (a.requires_grad()) ga = sum_to(g, a.rows(), a.cols());
                if (b.requires_grad()) gb = sum_to(g, b.rows(), b.cols());
                return std::vector<Tensor>{ga, gb};
              },
              "add");
}

Tensor sub(const Tensor& a, const Tensor& b) {
  Matrix out = (a.rows() == b.rows() && a.cols() == b.cols())
                   ? Matrix(a.value() - b.value())
                   : broadcast_apply(a.value(), b.value(), "sub", [](double x, double y) { return x - y; });
  return make(recording_tape({&a, &b}), std::move(out), {a, b},
              [a, b](const Tensor&, const Tensor& g) {
                Tensor ga, gb;
                if (a.requires_grad()) ga = sum_to(g, a.rows(), a.cols());
                if (b.requires_grad()) gb = sum_to(neg(g), b.rows(), b.cols());
                return std::vector<Tensor>{ga, gb};
              },
              "sub");
}

Tensor mul(const Tensor& a, const Tensor& b) {
  Matrix out = (a.rows() == b.rows() && a.cols() == b.cols())
                   ? Matrix(a.value().cwiseProduct(b.value()))
                   : broadcast_apply(a.value(), b.value(), "mul", [](double x, double y) { return x * y; });
  return make(recording_tape({&a, &b}), std::move(out), {a, b},
              [a, b](const Tensor&, const Tensor& g) {
                Tensor ga, gb;
                if (a.requires_grad()) ga = sum_to(mul(g, b), a.rows(), a.cols());
                if (b.requires_grad()) gb = sum_to(mul(g, a), b.rows(), b.cols());
                return std::vector<Tensor>{ga, gb};
              },
              "mul");
}

Tensor scale(const Tensor& a, double factor) {
  return make(recording_tape({&a}), a.value() * factor, {a},
              [factor](const Tensor&, const Tensor& g) { return std::vector<Tensor>{scale(g, factor)}; }, "scale");
}

Tensor add_scalar(const Tensor& a, double offset) {
  Matrix out = a.value().array() + offset;
  return make(recording_tape({&a}), std::move(out), {a},
              [](const Tensor&, const Tensor& g) { return std::vector<Tensor>{g}; }, "add_scalar");
}

Tensor neg(const Tensor& a) { return scale(a, -1.0); }

Tensor concat_cols(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw Error(ErrorCode::ShapeMismatch, "concat of zero tensors");
  Index cols = 0;
  for (const auto& p : parts) {
    if (p.rows() != parts.front().rows()) shape_error("concat_cols", parts.front().value(), p.value());
    cols += p.cols();
  }
  Matrix out(parts.front().rows(), cols);
  Index offset = 0;
  for (const auto& p : parts) {
    out.middleCols(offset, p.cols()) = p.value();
    offset += p.cols();
  }
  std::vector<Index> widths;
  for (const auto& p : parts) widths.push_back(p.cols());
  return make(recording_tape(parts), std::move(out), parts,
              [widths](const Tensor&, const Tensor& g) {
                std::vector<Tensor> grads;
                Index start = 0;
                for (Index w : widths) {
                  grads.push_back(slice_cols(g, start, w));
                  start += w;
                }
                return grads;
              },
              "concat_cols");
}

Tensor slice_cols(const Tensor& a, Index start, Index count) {
  if (start < 0 || count < 0 || start + count > a.cols())
    throw Error(ErrorCode::ShapeMismatch, "slice_cols out of range for " + a.shape());
  const Index total = a.cols();
  return make(recording_tape({&a}), a.value().middleCols(start, count), {a},
              [start, total](const Tensor&, const Tensor& g) {
                return std::vector<Tensor>{pad_cols(g, start, total)};
              },
              "slice_cols");
}

Tensor pad_cols(const Tensor& a, Index start, Index total) {
  if (start < 0 || start + a.cols() > total) throw Error(ErrorCode::ShapeMismatch, "pad_cols out of range for " + a.shape());
  Matrix out = Matrix::Zero(a.rows(), total);
  out.middleCols(start, a.cols()) = a.value();
  const Index count = a.cols();
  return make(recording_tape({&a}), std::move(out), {a},
              [start, count](const Tensor&, const Tensor& g) {
                return std::vector<Tensor>{slice_cols(g, start, count)};
              },
              "pad_cols");
}

Tensor slice_rows(const Tensor& a, Index start, Index count) {
  if (start < 0 || count < 0 || start + count > a.rows())
    throw Error(ErrorCode::ShapeMismatch, "slice_rows out of range for " + a.shape());
  const Index total = a.rows();
  return make(recording_tape({&a}), a.value().middleRows(start, count), {a},
              [start, total](const Tensor&, const Tensor& g) {
                return std::vector<Tensor>{pad_rows(g, start, total)};
              },
              "slice_rows");
}

Tensor pad_rows(const Tensor& a, Index start, Index total) {
  if (start < 0 || start + a.rows() > total) throw Error(ErrorCode::ShapeMismatch, "pad_rows out of range for " + a.shape());
  Matrix out = Matrix::Zero(total, a.cols());
  out.middleRows(start, a.rows()) = a.value();
  const Index count = a.rows();
  return make(recording_tape({&a}), std::move(out), {a},
              [start, count](const Tensor&, const Tensor& g) {
                return std::vector<Tensor>{slice_rows(g, start, count)};
              },
              "pad_rows");
}

Tensor reduce_sum(const Tensor& a, int axis) {
  const Matrix& v = a.value();
  Matrix out;
  if (axis == 0) {
    out = Matrix::Zero(1, v.cols());
    for (Index c = 0; c < v.cols(); ++c) {
      double s = 0.0;
      for (Index r = 0; r < v.rows(); ++r) s += v(r, c);
      out(0, c) = s;
    }
  } else if (axis == 1) {
    out = Matrix::Zero(v.rows(), 1);
    for (Index r = 0; r < v.rows(); ++r) {
      double s = 0.0;
      for (Index c = 0; c < v.cols(); ++c) s += v(r, c);
      out(r, 0) = s;
    }
  } else {
    throw Error(ErrorCode::ShapeMismatch, "reduce_sum axis must be 0 or 1");
  }
  const Index rows = a.rows(), cols = a.cols();
  return make(recording_tape({&a}), std::move(out), {a},
              [rows, cols](const Tensor&, const Tensor& g) {
                return std::vector<Tensor>{broadcast_to(g, rows, cols)};
              },
              "reduce_sum");
}

Tensor sum(const Tensor& a) { return reduce_sum(reduce_sum(a, 1), 0); }

Tensor mean(const Tensor& a) {
  if (a.size() == 0) throw Error(ErrorCode::ShapeMismatch, "mean of empty tensor");
  return scale(sum(a), 1.0 / static_cast<double>(a.size()));
}

Tensor broadcast_to(const Tensor& a, Index rows, Index cols) {
  if ((a.rows() != rows && a.rows() != 1) || (a.cols() != cols && a.cols() != 1))
    throw Error(ErrorCode::ShapeMismatch, "cannot broadcast " + a.shape() + " to " + std::to_string(rows) + "x" +
                                              std::to_string(cols));
  if (a.rows() == rows && a.cols() == cols) return a;
  Matrix out = a.value().replicate(a.rows() == rows ? 1 : rows, a.cols() == cols ? 1 : cols);
  const Index r0 = a.rows(), c0 = a.cols();
  return make(recording_tape({&a}), std::move(out), {a},
              [r0, c0](const Tensor&, const Tensor& g) { return std::vector<Tensor>{sum_to(g, r0, c0)}; },
              "broadcast_to");
}

Tensor sum_to(const Tensor& a, Index rows, Index cols) {
  Tensor out = a;
  if (rows == 1 && out.rows() != 1) out = reduce_sum(out, 0);
  if (cols == 1 && out.cols() != 1) out = reduce_sum(out, 1);
  if (out.rows() != rows || out.cols() != cols)
    throw Error(ErrorCode::ShapeMismatch, "cannot reduce " + a.shape() + " to " + std::to_string(rows) + "x" +
                                              std::to_string(cols));
  return out;
}

Tensor exp(const Tensor& a) {
  Matrix out = a.value().array().exp();
  return make(recording_tape({&a}), std::move(out), {a},
              [](const Tensor& self, const Tensor& g) { return std::vector<Tensor>{mul(g, self)}; }, "exp");
}

Tensor pow(const Tensor& a, double exponent) {
  Matrix out = a.value().array().pow(exponent);
  return make(recording_tape({&a}), std::move(out), {a},
              [a, exponent](const Tensor&, const Tensor& g) {
                return std::vector<Tensor>{mul(g, scale(pow(a, exponent - 1.0), exponent))};
              },
              "pow");
}

Tensor celu(const Tensor& a, double alpha) {
  if (auto* monitor = KinkMonitor::current()) monitor->observe(a.value());
  Matrix out = a.value().unaryExpr([alpha](double x) { return x > 0.0 ? x : alpha * (std::exp(x / alpha) - 1.0); });
  return make(recording_tape({&a}), std::move(out), {a},
              [a, alpha](const Tensor&, const Tensor& g) {
                return std::vector<Tensor>{mul(g, celu_derivative(a, alpha, 1))};
              },
              "celu");
}

Tensor sigmoid(const Tensor& a) {
  Matrix out = a.value().unaryExpr([](double x) {
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
  });
  return make(recording_tape({&a}), std::move(out), {a},
              [](const Tensor& self, const Tensor& g) {
                return std::vector<Tensor>{mul(g, mul(self, add_scalar(neg(self), 1.0)))};
              },
              "sigmoid");
}

Tensor softmax(const Tensor& a) {
  const Matrix& v = a.value();
  Matrix out(v.rows(), v.cols());
  for (Index r = 0; r < v.rows(); ++r) {
    const double m = v.row(r).maxCoeff();
    double total = 0.0;
    for (Index c = 0; c < v.cols(); ++c) {
      out(r, c) = std::exp(v(r, c) - m);
      total += out(r, c);
    }
    for (Index c = 0; c < v.cols(); ++c) out(r, c) /= total;
  }
  return make(recording_tape({&a}), std::move(out), {a},
              [](const Tensor& self, const Tensor& g) {
                return std::vector<Tensor>{mul(self, sub(g, reduce_sum(mul(g, self), 1)))};
              },
              "softmax");
}

Tensor gather_rows(const Tensor& a, const IndexList& idx) {
  const auto& ids = *idx;
  Matrix out(static_cast<Index>(ids.size()), a.cols());
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (ids[k] < 0 || ids[k] >= a.rows()) throw Error(ErrorCode::ShapeMismatch, "gather_rows index out of range");
    out.row(static_cast<Index>(k)) = a.value().row(ids[k]);
  }
  const Index rows = a.rows();
  return make(recording_tape({&a}), std::move(out), {a},
              [idx, rows](const Tensor&, const Tensor& g) {
                return std::vector<Tensor>{scatter_add_rows(g, idx, rows)};
              },
              "gather_rows");
}

Tensor scatter_add_rows(const Tensor& a, const IndexList& idx, Index rows) {
  const auto& ids = *idx;
  if (static_cast<Index>(ids.size()) != a.rows())
    throw Error(ErrorCode::ShapeMismatch, "scatter_add_rows: index length does not match " + a.shape());
  Matrix out = Matrix::Zero(rows, a.cols());
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (ids[k] < 0 || ids[k] >= rows) throw Error(ErrorCode::ShapeMismatch, "scatter_add_rows index out of range");
    out.row(ids[k]) += a.value().row(static_cast<Index>(k));
  }
  return make(recording_tape({&a}), std::move(out), {a},
              [idx](const Tensor&, const Tensor& g) { return std::vector<Tensor>{gather_rows(g, idx)}; },
              "scatter_add_rows");
}

Tensor straight_through(const Matrix& hard, const Tensor& soft) {
  if (hard.rows() != soft.rows() || hard.cols() != soft.cols())
    shape_error("straight_through", hard, soft.value());
  return make(recording_tape({&soft}), hard, {soft},
              [](const Tensor&, const Tensor& g) { return std::vector<Tensor>{g}; }, "straight_through");
}

Tensor detach(const Tensor& a) { return Tensor(a.value()); }

}  // namespace equigan::ad
