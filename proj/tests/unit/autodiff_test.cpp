#include <doctest.h>

#include <cmath>
#include <random>

#include "equigan/autodiff/gradcheck.hpp"
#include "equigan/autodiff/tensor.hpp"

using namespace equigan::ad;

namespace {

Matrix random_matrix(Index r, Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix m(r, c);
  for (Index k = 0; k < m.size(); ++k) m.data()[k] = normal(rng);
  return m;
}

/// Central-difference check with the pinned tolerance.
void expect_gradient(const ScalarFn& f, const Matrix& x) {
  const auto report = gradient_check(f, x, 1e-5);
  CHECK(report.checked > 0);
  CHECK(report.max_rel_error < 1e-4);
}

}  // namespace

TEST_CASE("matmul matches a triple loop") {
  std::mt19937_64 rng(1);
  const Matrix a = random_matrix(3, 4, rng), b = random_matrix(4, 2, rng);
  const Matrix c = matmul(Tensor(a), Tensor(b)).value();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) {
      double s = 0;
      for (int k = 0; k < 4; ++k) s += a(i, k) * b(k, j);
      CHECK(c(i, j) == doctest::Approx(s).epsilon(1e-14));
    }
  CHECK_THROWS_AS(matmul(Tensor(a), Tensor(a)), equigan::Error);
}

TEST_CASE("celu fixes the origin") {
  for (double alpha : {0.5, 1.0, 2.0}) CHECK(celu(Tensor(Matrix::Zero(2, 2)), alpha).value().isZero());
  const Matrix x = (Matrix(1, 2) << -1.0, 2.0).finished();
  const Matrix y = celu(Tensor(x), 1.0).value();
  CHECK(y(0, 0) == doctest::Approx(std::exp(-1.0) - 1.0));
  CHECK(y(0, 1) == 2.0);
}

TEST_CASE("sum of ones and its gradient") {
  Tape tape;
  Tensor x = tape.variable(Matrix::Ones(5, 1));
  Tensor s = reduce_sum(x, 0);
  CHECK(s.item() == 5.0);
  tape.backward(s);
  CHECK(*x.grad() == Matrix::Ones(5, 1));
}

TEST_CASE("dot(x, x) has gradient 2x") {
  std::mt19937_64 rng(2);
  const Matrix v = random_matrix(4, 1, rng);
  Tape tape;
  Tensor x = tape.variable(v);
  tape.backward(sum(x * x));
  CHECK(x.grad()->isApprox(2.0 * v, 1e-15));
}

TEST_CASE("backward contract") {
  Tape tape;
  Tensor x = tape.variable(Matrix::Ones(2, 2));
  CHECK_THROWS_AS(tape.backward(x * x), equigan::Error);
  Tensor s = sum(x);
  tape.backward(s);
  try {
    tape.backward(s);
    FAIL("second backward must fail");
  } catch (const equigan::Error& e) {
    CHECK(e.code() == equigan::ErrorCode::TapeConsumed);
  }
  tape.reset();
  Tensor y = tape.variable(Matrix::Ones(1, 1));
  tape.backward(sum(y));
  CHECK((*y.grad())(0, 0) == 1.0);
}

TEST_CASE("shape mismatches are reported with both shapes") {
  try {
    add(Tensor(Matrix::Ones(2, 3)), Tensor(Matrix::Ones(3, 2)));
    FAIL("expected ShapeMismatch");
  } catch (const equigan::Error& e) {
    CHECK(e.code() == equigan::ErrorCode::ShapeMismatch);
    const std::string what = e.what();
    CHECK(what.find("2x3") != std::string::npos);
    CHECK(what.find("3x2") != std::string::npos);
  }
}

TEST_CASE("broadcasting add sums gradients back to the small operand") {
  Tape tape;
  Tensor a = tape.variable(Matrix::Ones(3, 2));
  Tensor b = tape.variable(Matrix::Ones(1, 2));
  tape.backward(sum(a + b));
  CHECK(*b.grad() == Matrix::Constant(1, 2, 3.0));
}

TEST_CASE("constants do not grow the tape") {
  Tape tape;
  Tensor c(Matrix::Ones(2, 2));
  Tensor d = c * c;
  CHECK_FALSE(d.requires_grad());
  CHECK(tape.size() == 0);
}

TEST_CASE("paused tape records nothing") {
  Tape tape;
  Tensor x = tape.variable(Matrix::Ones(2, 2));
  {
    Tape::Pause pause(tape);
    Tensor y = x * x;
    CHECK_FALSE(y.requires_grad());
  }
  CHECK((x * x).requires_grad());
}

TEST_CASE("gradient_check of linear maps is exact up to rounding") {
  std::mt19937_64 rng(3);
  const auto report = gradient_check([](const Tensor& x) { return sum(x); }, random_matrix(3, 3, rng));
  CHECK(report.max_rel_error < 1e-9);
}

TEST_CASE("celu composition away from the kink") {
  std::mt19937_64 rng(4);
  Matrix x = random_matrix(4, 3, rng);
  for (Index k = 0; k < x.size(); ++k)
    if (std::abs(x.data()[k]) < 0.1) x.data()[k] = 0.5;
  const auto report =
      gradient_check([](const Tensor& t) { return sum(celu(scale(celu(t, 1.0), 1.5), 0.7) * t); }, x, 1e-5);
  CHECK(report.nonsmooth.empty());
  CHECK(report.max_rel_error < 1e-6);
}

TEST_CASE("celu at zero is flagged and skipped") {
  Matrix x = Matrix::Ones(1, 3);
  x(0, 1) = 0.0;
  const auto report = gradient_check([](const Tensor& t) { return sum(celu(t, 1.0)); }, x, 1e-5);
  REQUIRE(report.nonsmooth.size() == 1);
  CHECK(report.nonsmooth[0] == 1);
  CHECK(report.checked == 2);
}

TEST_CASE("every primitive passes gradient_check") {
  std::mt19937_64 rng(5);
  const Matrix x = random_matrix(3, 4, rng);
  const Matrix w = random_matrix(4, 2, rng);
  const Matrix r = random_matrix(3, 4, rng);
  const IndexList idx = make_index({2, 0, 0, 1, 2});

  expect_gradient([&](const Tensor& t) { return sum(matmul(t, Tensor(w)) * matmul(t, Tensor(w))); }, x);
  expect_gradient([&](const Tensor& t) { return sum(matmul(transpose(t), t)); }, x);
  expect_gradient([&](const Tensor& t) { return sum((t + Tensor(r)) * (t - Tensor(r))); }, x);
  expect_gradient([&](const Tensor& t) { return sum(add(t, slice_rows(t, 1, 1)) * t); }, x);
  expect_gradient([&](const Tensor& t) { return sum(scale(add_scalar(neg(t), 0.3), 2.0) * t); }, x);
  expect_gradient([&](const Tensor& t) { return sum(concat_cols({t, scale(t, 2.0)}) * concat_cols({t, t})); }, x);
  expect_gradient([&](const Tensor& t) { return sum(slice_cols(t, 1, 2) * slice_cols(t, 2, 2)); }, x);
  expect_gradient([&](const Tensor& t) { return sum(pad_cols(t, 1, 6) * pad_cols(t, 2, 6)); }, x);
  expect_gradient([&](const Tensor& t) { return sum(pad_rows(t, 1, 5) * pad_rows(t, 0, 5)); }, x);
  expect_gradient([&](const Tensor& t) { return sum(reduce_sum(t, 0) * reduce_sum(t, 0)); }, x);
  expect_gradient([&](const Tensor& t) { return sum(reduce_sum(t, 1) * reduce_sum(t, 1)); }, x);
  expect_gradient([&](const Tensor& t) { return mean(t * t); }, x);
  expect_gradient([&](const Tensor& t) { return sum(broadcast_to(slice_rows(t, 0, 1), 3, 4) * t); }, x);
  expect_gradient([&](const Tensor& t) { return sum(sum_to(t * t, 1, 4) * slice_rows(t, 2, 1)); }, x);
  expect_gradient([&](const Tensor& t) { return sum(exp(scale(t, 0.5))); }, x);
  expect_gradient([&](const Tensor& t) { return sum(pow(add_scalar(t * t, 1.0), 0.5)); }, x);
  expect_gradient([&](const Tensor& t) { return sum(sigmoid(t) * t); }, x);
  expect_gradient([&](const Tensor& t) { return sum(softmax(t) * Tensor(r)); }, x);
  expect_gradient([&](const Tensor& t) { return sum(gather_rows(t, idx) * gather_rows(t, idx)); }, x);
  expect_gradient([&](const Tensor& t) { return sum(scatter_add_rows(t * t, make_index({1, 1, 0}), 2)); }, x);
}

TEST_CASE("straight_through and detach route gradients by design") {
  std::mt19937_64 rng(8);
  const Matrix r = random_matrix(2, 3, rng);
  Tape tape;
  Tensor x = tape.variable(random_matrix(2, 3, rng));
  Tensor st = straight_through(Matrix::Ones(2, 3), x);
  CHECK(st.value() == Matrix::Ones(2, 3));
  Tensor through = tape.gradient(sum(st * Tensor(r)), {x}).front();
  CHECK(through.value() == r);
  Tensor blocked = tape.gradient(sum(detach(x) * Tensor(r)), {x}).front();
  CHECK(blocked.value().isZero());
}

TEST_CASE("softmax rows sum to one and survive large logits") {
  Matrix big(2, 3);
  big << 1000, 1001, 999, -5, 0, 5;
  const Matrix p = softmax(Tensor(big)).value();
  for (int i = 0; i < 2; ++i) CHECK(p.row(i).sum() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(p.allFinite());
}

TEST_CASE("double backward: gradient of a gradient norm") {
  // f(x) = sum(x^3); ||grad f||^2 = sum(9 x^4); its gradient is 36 x^3.
  std::mt19937_64 rng(6);
  const Matrix v = random_matrix(3, 1, rng);
  Tape tape;
  Tensor x = tape.variable(v);
  Tensor f = sum(x * x * x);
  Tensor g = tape.gradient(f, {x}, true).front();
  Tensor penalty = sum(g * g);
  Tensor h = tape.gradient(penalty, {x}).front();
  CHECK(h.value().isApprox(36.0 * v.array().cube().matrix(), 1e-12));
}

TEST_CASE("forward values are bit-identical across runs") {
  std::mt19937_64 rng(7);
  const Matrix x = random_matrix(10, 6, rng);
  const IndexList idx = make_index({3, 1, 3, 0, 9, 9, 2});
  const IndexList into = make_index({0, 1, 0, 1, 2, 2, 0});
  auto run = [&] { return scatter_add_rows(gather_rows(softmax(Tensor(x)), idx), into, 3).value(); };
  CHECK(run() == run());
}
