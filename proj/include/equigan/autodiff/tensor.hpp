#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "equigan/error.hpp"

namespace equigan::ad {

using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;
using IndexList = std::shared_ptr<const std::vector<Index>>;

class Tape;
struct Node;

/// Handle to a dense rank-2 array that may participate in reverse-mode
/// differentiation. Scalars are 1x1. Copies share the underlying node.
class Tensor {
 public:
  Tensor() = default;
  /// Constant (no gradient tracking).
  explicit Tensor(Matrix value);
  explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  static Tensor scalar(double v);

  bool defined() const { return node_ != nullptr; }
  const Matrix& value() const;
  Index rows() const { return value().rows(); }
  Index cols() const { return value().cols(); }
  Index size() const { return value().size(); }
  double item() const;

  bool requires_grad() const;
  Tape* tape() const;
  /// Gradient accumulated by Tape::backward; null for non-leaves or before backward.
  const Matrix* grad() const;

  std::string shape() const;
  const std::shared_ptr<Node>& node() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

using BackwardFn = std::function<std::vector<Tensor>(const Tensor& self, const Tensor& grad)>;

struct Node {
  Matrix value;
  std::vector<Tensor> inputs;
  BackwardFn backward;
  Tape* tape = nullptr;
  std::size_t index = 0;
  std::optional<Matrix> grad;
  const char* op = "const";
};

/// Ordered record of the operations applied to tracked tensors.
///
/// Ops append to the tape of their tracked inputs. backward() may run once per
/// tape (until reset()); gradient() is non-consuming and can build a
/// differentiable graph of the gradient itself when `create_graph` is set.
class Tape {
 public:
  Tape() = default;
  ~Tape();
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Leaf tensor with gradient tracking.
  Tensor variable(Matrix value);

  /// Accumulates d(root)/d(leaf) into every variable's grad(). Consumes the tape.
  void backward(const Tensor& root);

  /// d(root)/d(w) for each w in `wrt`. Untouched inputs get zero gradients.
  std::vector<Tensor> gradient(const Tensor& root, const std::vector<Tensor>& wrt, bool create_graph = false);

  void reset();
  bool consumed() const { return consumed_; }
  bool recording() const { return pause_depth_ == 0; }
  std::size_t size() const { return nodes_.size(); }

  /// Suspends recording for the lifetime of the guard.
  class Pause {
   public:
    explicit Pause(Tape& tape) : tape_(tape) { ++tape_.pause_depth_; }
    ~Pause() { --tape_.pause_depth_; }
    Pause(const Pause&) = delete;
    Pause& operator=(const Pause&) = delete;

   private:
    Tape& tape_;
  };

  Tensor record(Matrix value, std::vector<Tensor> inputs, BackwardFn backward, const char* op);

 private:
  void detach_all();

  std::vector<std::shared_ptr<Node>> nodes_;
  bool consumed_ = false;
  int pause_depth_ = 0;
};

/// Records the sign pattern of every non-smooth op input evaluated while the
/// monitor is installed. Used by gradient_check to detect kink crossings.
class KinkMonitor {
 public:
  KinkMonitor();
  ~KinkMonitor();
  KinkMonitor(const KinkMonitor&) = delete;
  KinkMonitor& operator=(const KinkMonitor&) = delete;

  void observe(const Matrix& input);
  std::uint64_t signature() const { return hash_; }

  static KinkMonitor* current();

 private:
  std::uint64_t hash_ = 1469598103934665603ULL;
  KinkMonitor* previous_ = nullptr;
};

// ---------------------------------------------------------------------------
// primitives

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

/// Elementwise with rank-2 broadcasting: each extent equal or 1.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);
Tensor add_scalar(const Tensor& a, double offset);
Tensor neg(const Tensor& a);

Tensor concat_cols(const std::vector<Tensor>& parts);
Tensor slice_cols(const Tensor& a, Index start, Index count);
Tensor pad_cols(const Tensor& a, Index start, Index total);
Tensor slice_rows(const Tensor& a, Index start, Index count);
Tensor pad_rows(const Tensor& a, Index start, Index total);

/// axis 0 sums over rows (-> 1 x c); axis 1 sums over columns (-> r x 1).
Tensor reduce_sum(const Tensor& a, int axis);
Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);
Tensor broadcast_to(const Tensor& a, Index rows, Index cols);
/// Sums broadcast extents back down to rows x cols.
Tensor sum_to(const Tensor& a, Index rows, Index cols);

Tensor exp(const Tensor& a);
Tensor pow(const Tensor& a, double exponent);
Tensor celu(const Tensor& a, double alpha = 1.0);
Tensor sigmoid(const Tensor& a);
/// Row-wise softmax over the last axis.
Tensor softmax(const Tensor& a);

/// out.row(k) = a.row(idx[k]).
Tensor gather_rows(const Tensor& a, const IndexList& idx);
/// out.row(idx[k]) += a.row(k), k ascending; out has `rows` rows.
Tensor scatter_add_rows(const Tensor& a, const IndexList& idx, Index rows);

/// Forward value `hard`; gradient passes straight to `soft`.
Tensor straight_through(const Matrix& hard, const Tensor& soft);
Tensor detach(const Tensor& a);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }

IndexList make_index(std::vector<Index> idx);

}  // namespace equigan::ad
