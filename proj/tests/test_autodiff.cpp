#include <gtest/gtest.h>

#include <array>
#include <random>

#include "synlstm/error.hpp"
#include "synlstm/ops.hpp"
#include "synlstm/params.hpp"
#include "test_util.hpp"

using namespace synlstm;
using namespace synlstm::ad;
using testutil::numeric_grad;
using testutil::random_tensor;
using testutil::rel_err;

namespace {

// Checks d/d(input) of sum(weights * f(inputs)) for every input that requires
// a gradient.
void check_op(const std::vector<Tensor>& inputs, const std::function<Tensor(Tape&)>& f,
              std::mt19937_64& rng, double tol = 1e-6) {
  Tensor weights;
  auto loss_of = [&](Tape& tape) {
    Tensor y = f(tape);
    if (!weights.defined()) weights = random_tensor(y.shape(), rng, false);
    return sum(tape, mul(tape, y, weights));
  };
  for (const auto& in : inputs) in.clear_grad();
  Tape tape;
  Tensor loss = loss_of(tape);
  tape.backward(loss);
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    if (!inputs[k].requires_grad()) continue;
    const std::vector<double> analytic(inputs[k].grad().begin(), inputs[k].grad().end());
    const auto numeric = numeric_grad(inputs[k], [&] {
      Tape t;
      return loss_of(t).item();
    });
    for (std::size_t i = 0; i < analytic.size(); ++i) {
      EXPECT_LT(rel_err(analytic[i], numeric[i]), tol)
          << "input " << k << " entry " << i << ": " << analytic[i] << " vs " << numeric[i];
    }
  }
}

}  // namespace

TEST(Tensor, ShapeAndDataAgree) {
  EXPECT_THROW(Tensor(Shape{2, 3}, std::vector<double>(5)), DimensionError);
  EXPECT_THROW(Tensor(Shape{2, 2, 2}), DimensionError);
  Tensor t(Shape{2, 3});
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.cols(), 3u);
  Tensor v = Tensor::vector({1, 2, 3});
  EXPECT_EQ(v.rows(), 1u);
  EXPECT_EQ(v.cols(), 3u);
}

TEST(Tensor, CopiesAliasAndCloneDetaches) {
  Tensor a = Tensor::vector({1, 2});
  Tensor b = a;
  b.data_mut()[0] = 5;
  EXPECT_EQ(a[0], 5);
  Tensor c = a.clone();
  c.data_mut()[1] = 9;
  EXPECT_EQ(a[1], 2);
}

TEST(Ops, MatmulExamples) {
  Tape tape;
  Tensor id = Tensor::matrix(2, 2, {1, 0, 0, 1});
  Tensor v = Tensor::matrix(2, 1, {3, 4});
  Tensor out = matmul(tape, id, v);
  EXPECT_EQ(out.shape(), (Shape{2, 1}));
  EXPECT_EQ(out[0], 3);
  EXPECT_EQ(out[1], 4);
  EXPECT_EQ(matmul(tape, Tensor::matrix(1, 1, {2}), Tensor::matrix(1, 1, {0}))[0], 0);
  EXPECT_THROW(matmul(tape, Tensor(Shape{2, 3}), Tensor(Shape{2, 3})), DimensionError);
  try {
    matmul(tape, Tensor(Shape{2, 3}), Tensor(Shape{4, 5}));
  } catch (const DimensionError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("2"), std::string::npos);
    EXPECT_NE(msg.find("4"), std::string::npos);
  }
}

TEST(Ops, MatmulGradientOfSumIsOnesTimesBTransposed) {
  std::mt19937_64 rng(1);
  Tensor a = random_tensor({3, 4}, rng), b = random_tensor({4, 2}, rng, false);
  Tape tape;
  tape.backward(sum(tape, matmul(tape, a, b)));
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t p = 0; p < 4; ++p) {
      EXPECT_NEAR(a.grad()[i * 4 + p], b.at(p, 0) + b.at(p, 1), 1e-14);
    }
  }
  const auto numeric = numeric_grad(a, [&] {
    Tape t;
    return sum(t, matmul(t, a, b)).item();
  });
  for (std::size_t i = 0; i < numeric.size(); ++i) EXPECT_LT(rel_err(a.grad()[i], numeric[i]), 1e-6);
}

TEST(Ops, ElementwiseValues) {
  Tape tape;
  Tensor z = Tensor::vector({0.0});
  EXPECT_EQ(sigmoid(tape, z)[0], 0.5);
  EXPECT_EQ(ad::tanh(tape, z)[0], 0.0);
  Tensor r = relu(tape, Tensor::vector({-1.5, 2.25}));
  EXPECT_EQ(r[0], 0.0);
  EXPECT_EQ(r[1], 2.25);
  // Large magnitudes stay finite.
  Tensor s = sigmoid(tape, Tensor::vector({-800.0, 800.0}));
  EXPECT_EQ(s[0], 0.0);
  EXPECT_EQ(s[1], 1.0);
}

TEST(Ops, ElementwiseDispatch) {
  Tape tape;
  Tensor a = Tensor::vector({1, -2}), b = Tensor::vector({3, 4});
  const std::array<Tensor, 2> two{a, b};
  EXPECT_EQ(elementwise(tape, Elementwise::add, two)[1], 2.0);
  EXPECT_EQ(elementwise(tape, Elementwise::mul, two)[1], -8.0);
  const std::array<Tensor, 1> one{a};
  EXPECT_EQ(elementwise(tape, Elementwise::relu, one)[1], 0.0);
  EXPECT_THROW(elementwise(tape, Elementwise::add, one), ContractError);
  EXPECT_THROW(add(tape, a, Tensor::vector({1, 2, 3})), DimensionError);
}

TEST(Ops, ReluDerivativeAtZeroIsZero) {
  Tensor x = Tensor::vector({0.0, 1.0, -1.0}, true);
  Tape tape;
  tape.backward(sum(tape, relu(tape, x)));
  EXPECT_EQ(x.grad()[0], 0.0);
  EXPECT_EQ(x.grad()[1], 1.0);
  EXPECT_EQ(x.grad()[2], 0.0);
}

TEST(Ops, SumGradientIsOnes) {
  Tensor x = Tensor::vector({1, 2, 3, 4}, true);
  Tape tape;
  tape.backward(sum(tape, x));
  for (double g : x.grad()) EXPECT_EQ(g, 1.0);
}

TEST(Ops, SigmoidAtZeroGivesQuarter) {
  Tensor w = Tensor::vector({0.0}, true);
  Tensor c = Tensor::vector({3.0});
  Tape tape;
  tape.backward(sum(tape, mul(tape, sigmoid(tape, w), c)));
  EXPECT_EQ(w.grad()[0], 0.25 * 3.0);
}

TEST(Ops, ConcatShapes) {
  Tape tape;
  const std::array<Tensor, 2> parts{Tensor::vector({1, 2}), Tensor::vector({3, 4, 5})};
  Tensor c = concat(tape, parts, 0);
  EXPECT_EQ(c.size(), 5u);
  EXPECT_EQ(c[4], 5.0);
  const std::array<Tensor, 2> zeros{Tensor(Shape{0}), Tensor(Shape{0})};
  EXPECT_EQ(concat(tape, zeros, 0).size(), 0u);
}

TEST(Ops, SliceGradientOnlyReachesSlicedRows) {
  std::mt19937_64 rng(2);
  Tensor x = random_tensor({4, 3}, rng);
  Tape tape;
  tape.backward(sum(tape, slice_rows(tape, x, 1, 2)));
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 3; ++c) {
      EXPECT_EQ(x.grad()[r * 3 + c], (r == 1 || r == 2) ? 1.0 : 0.0);
    }
  }
}

TEST(Ops, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(11);
  Tensor a = random_tensor({3, 4}, rng), b = random_tensor({4, 2}, rng);
  Tensor c = random_tensor({3, 4}, rng), d = random_tensor({3, 4}, rng);
  Tensor bias = random_tensor({5}, rng), w = random_tensor({5, 4}, rng), w2 = random_tensor({5, 2}, rng);
  Tensor x2 = random_tensor({3, 2}, rng);

  check_op({a, b}, [&](Tape& t) { return matmul(t, a, b); }, rng);
  check_op({c, d}, [&](Tape& t) { return add(t, c, d); }, rng);
  check_op({c, d}, [&](Tape& t) { return mul(t, c, d); }, rng);
  check_op({c}, [&](Tape& t) { return scale(t, c, -1.7); }, rng);
  check_op({c}, [&](Tape& t) { return sigmoid(t, c); }, rng);
  check_op({c}, [&](Tape& t) { return ad::tanh(t, c); }, rng);
  check_op({c}, [&](Tape& t) { return relu(t, c); }, rng);
  check_op({c, d}, [&](Tape& t) {
    const std::array<Tensor, 2> p{c, d};
    return concat(t, p, 1);
  }, rng);
  check_op({c, a}, [&](Tape& t) {
    const std::array<Tensor, 2> p{c, a};
    return concat(t, p, 0);
  }, rng);
  check_op({c, w, x2, w2, bias}, [&](Tape& t) {
    const std::array<LinearTerm, 2> terms{LinearTerm{c, w}, LinearTerm{x2, w2}};
    return linear(t, terms, bias);
  }, rng);
  check_op({c}, [&](Tape& t) { return slice_cols(t, c, 1, 2); }, rng);
  check_op({c}, [&](Tape& t) {
    const std::vector<std::size_t> idx{2, 0, 2};
    return select_rows(t, c, idx);
  }, rng);
  check_op({c, d}, [&](Tape& t) {
    const std::vector<unsigned char> keep{1, 0, 1};
    return blend_rows(t, keep, c, d);
  }, rng);
  check_op({c}, [&](Tape& t) {
    SparseRows wts;
    wts.rows = {{{0, 0.5}, {2, 0.25}}, {{1, 1.0}}, {}, {{2, 2.0}, {0, -1.0}}};
    return aggregate_rows(t, c, wts);
  }, rng);
  Tensor table = random_tensor({5, 3}, rng);
  check_op({table}, [&](Tape& t) {
    const std::vector<std::size_t> ids{3, 0, 3, 1};
    return gather_rows(t, table, ids, 0);
  }, rng);
  Tensor bias3 = random_tensor({4}, rng);
  check_op({c, bias3}, [&](Tape& t) { return add_bias(t, c, bias3); }, rng);
}

TEST(Ops, GatherPadRowsAreZeroAndGetNoGradient) {
  std::mt19937_64 rng(4);
  Tensor table = random_tensor({3, 2}, rng);
  const std::vector<std::size_t> ids{0, 2, 0};
  Tape tape;
  Tensor out = gather_rows(tape, table, ids, 0);
  EXPECT_EQ(out.at(0, 0), 0.0);
  EXPECT_EQ(out.at(2, 1), 0.0);
  EXPECT_EQ(out.at(1, 0), table.at(2, 0));
  tape.backward(sum(tape, out));
  EXPECT_EQ(table.grad()[0], 0.0);
  EXPECT_EQ(table.grad()[1], 0.0);
  EXPECT_EQ(table.grad()[4], 1.0);
}

TEST(Ops, DropoutIsIdentityAtZeroRateAndInvertedOtherwise) {
  std::mt19937_64 rng(8);
  Tensor x = random_tensor({50, 40}, rng);
  Tape tape;
  EXPECT_TRUE(dropout(tape, x, 0.0, rng).same_storage(x));
  Tensor y = dropout(tape, x, 0.5, rng);
  std::size_t kept = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (y[i] != 0.0) {
      ++kept;
      EXPECT_DOUBLE_EQ(y[i], 2.0 * x[i]);
    }
  }
  EXPECT_GT(kept, 800u);
  EXPECT_LT(kept, 1200u);
  EXPECT_THROW(dropout(tape, x, 1.0, rng), ContractError);
}

TEST(Tape, SecondBackwardWithoutResetIsStateError) {
  Tensor x = Tensor::vector({1.0}, true);
  Tape tape;
  Tensor loss = sum(tape, mul(tape, x, x));
  tape.backward(loss);
  EXPECT_THROW(tape.backward(loss), StateError);
  tape.reset();
  Tensor loss2 = sum(tape, mul(tape, x, x));
  EXPECT_NO_THROW(tape.backward(loss2));
  // Leaf gradients accumulate until cleared: 2x + 2x.
  EXPECT_EQ(x.grad()[0], 4.0);
}

TEST(Tape, NonScalarOrForeignLossIsContractError) {
  Tensor x = Tensor::vector({1.0, 2.0}, true);
  Tape tape, other;
  Tensor y = mul(tape, x, x);
  EXPECT_THROW(tape.backward(y), ContractError);
  Tensor foreign = sum(other, x);
  EXPECT_THROW(tape.backward(foreign), ContractError);
  EXPECT_THROW(tape.backward(Tensor::scalar(1.0)), ContractError);
}

TEST(Tape, NoGradientIntoConstants) {
  Tensor x = Tensor::vector({1.0, 2.0}, true);
  Tensor c = Tensor::vector({3.0, 4.0}, false);
  Tape tape;
  tape.backward(sum(tape, mul(tape, x, c)));
  EXPECT_FALSE(c.has_grad());
  EXPECT_EQ(x.grad()[1], 4.0);
}

TEST(Tape, ConstantsAreNotRecorded) {
  Tape tape;
  Tensor y = add(tape, Tensor::vector({1.0}), Tensor::vector({2.0}));
  EXPECT_EQ(tape.size(), 0u);
  EXPECT_FALSE(y.requires_grad());
}

TEST(Tape, ReplayIsDeterministic) {
  auto run = [] {
    std::mt19937_64 rng(21);
    Tensor a = random_tensor({4, 4}, rng), b = random_tensor({4, 4}, rng);
    Tape tape;
    Tensor loss = sum(tape, ad::tanh(tape, matmul(tape, sigmoid(tape, a), b)));
    tape.backward(loss);
    std::vector<double> out{loss.item()};
    out.insert(out.end(), a.grad().begin(), a.grad().end());
    out.insert(out.end(), b.grad().begin(), b.grad().end());
    return out;
  };
  EXPECT_EQ(run(), run());
}

TEST(Tape, ReachableLeavesGetGradients) {
  std::mt19937_64 rng(5);
  Tensor a = random_tensor({2, 2}, rng), unused = random_tensor({2, 2}, rng);
  Tape tape;
  tape.backward(sum(tape, mul(tape, a, a)));
  EXPECT_TRUE(a.has_grad());
  EXPECT_EQ(a.grad().size(), a.size());
  EXPECT_FALSE(unused.has_grad());
}

TEST(Params, DuplicateNamesAndGlorotRange) {
  ParamStore store;
  std::mt19937_64 rng(1);
  Tensor& w = store.add_glorot("w", 4, 6, rng);
  const double limit = std::sqrt(6.0 / 10.0);
  for (double v : w.data()) EXPECT_LE(std::abs(v), limit);
  EXPECT_THROW(store.add("w", {2}), ContractError);
  EXPECT_TRUE(store.contains("w"));
  EXPECT_EQ(store.total_size(), 24u);
}
