#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "revsent/nn/adam.hpp"
#include "revsent/nn/checkpoint.hpp"
#include "revsent/nn/grad_check.hpp"
#include "revsent/nn/init.hpp"
#include "revsent/nn/layers.hpp"
#include "support/finite_diff.hpp"

using namespace revsent::nn;
using revsent::Rng;
using testsupport::max_rel_error;
using testsupport::numeric_grad;
using testsupport::probe;
using testsupport::random_tensor;

namespace {

constexpr double kRtol = 1e-4;

LstmParams random_lstm(std::size_t in, std::size_t units, Rng& rng, const std::string& tag = "l") {
  LstmParams p{Param(tag + "/input", {in, 4 * units}), Param(tag + "/recurrent", {units, 4 * units}),
               Param(tag + "/bias", {4 * units})};
  p.input.value = random_tensor(p.input.value.shape, rng, 0.5);
  p.recurrent.value = random_tensor(p.recurrent.value.shape, rng, 0.5);
  p.bias.value = random_tensor(p.bias.value.shape, rng, 0.5);
  return p;
}

double sig(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Cell-by-cell recomputation with plain loops, one sequence at a time.
std::vector<std::vector<double>> naive_lstm(const Tensor& x, std::size_t b, const LstmParams& p, bool reverse) {
  const std::size_t L = x.dim(1), C = x.dim(2), U = p.units();
  std::vector<double> h(U, 0.0), c(U, 0.0);
  std::vector<std::vector<double>> hs(L);
  for (std::size_t step = 0; step < L; ++step) {
    const std::size_t t = reverse ? L - 1 - step : step;
    std::vector<double> z(4 * U);
    for (std::size_t j = 0; j < 4 * U; ++j) {
      double s = p.bias.value[j];
      for (std::size_t k = 0; k < C; ++k) s += x[(b * L + t) * C + k] * p.input.value[k * 4 * U + j];
      for (std::size_t k = 0; k < U; ++k) s += h[k] * p.recurrent.value[k * 4 * U + j];
      z[j] = s;
    }
    for (std::size_t u = 0; u < U; ++u) {
      const double i = sig(z[u]), f = sig(z[U + u]), g = std::tanh(z[2 * U + u]), o = sig(z[3 * U + u]);
      c[u] = f * c[u] + i * g;
      h[u] = o * std::tanh(c[u]);
    }
    hs[t] = h;
  }
  return hs;
}

}  // namespace

// ---------------------------------------------------------------- embedding

TEST(Embedding, Lookup) {
  Tensor table({3, 2}, {0, 1, 10, 11, 20, 21});
  const auto out = embedding_forward({1, 2, {2, 0}}, table);
  EXPECT_EQ(out.shape, (Shape{1, 2, 2}));
  EXPECT_EQ(out.data, (std::vector<double>{20, 21, 0, 1}));
  EXPECT_THROW(embedding_forward({1, 1, {3}}, table), revsent::IndexError);
  EXPECT_THROW(embedding_forward({1, 1, {-1}}, table), revsent::IndexError);
  Tensor zero({5, 4});
  for (double v : embedding_forward({2, 3, {0, 1, 2, 3, 4, 4}}, zero).data) EXPECT_EQ(v, 0.0);
}

TEST(Embedding, GradientAccumulatesDuplicates) {
  Rng rng(1);
  Tensor table = random_tensor({6, 3}, rng);
  const IdBatch ids{2, 4, {1, 5, 1, 0, 2, 2, 2, 1}};
  const Tensor w = random_tensor({2, 4, 3}, rng);
  Tensor grad({6, 3});
  embedding_backward(ids, w, grad);
  const auto num = numeric_grad(table, [&] { return probe(embedding_forward(ids, table), w); });
  EXPECT_LT(max_rel_error(grad, num), kRtol);
  for (std::size_t d = 0; d < 3; ++d) EXPECT_EQ(grad[3 * 3 + d], 0.0);  // id 3 unused
}

// ------------------------------------------------------------------- conv1d

TEST(Conv1D, HandExample) {
  Tensor x({1, 3, 1}, {1, 2, 4});
  Tensor k({2, 1, 1}, {1, -1});
  Tensor b({1});
  const auto y = conv1d_forward(x, k, b);
  EXPECT_EQ(y.shape, (Shape{1, 2, 1}));
  EXPECT_EQ(y.data, (std::vector<double>{0, 0}));
  // pre-activation [-1, -2] shows up once the kernel is flipped
  Tensor flipped({2, 1, 1}, {-1, 1});
  EXPECT_EQ(conv1d_forward(x, flipped, b).data, (std::vector<double>{1, 2}));
}

TEST(Conv1D, KernelOneIsRelu) {
  Tensor x({1, 4, 1}, {-1, 2, -3, 4});
  EXPECT_EQ(conv1d_forward(x, Tensor({1, 1, 1}, {1}), Tensor({1})).data,
            (std::vector<double>{0, 2, 0, 4}));
}

TEST(Conv1D, ShortSequenceIsShapeError) {
  EXPECT_THROW(conv1d_forward(Tensor({1, 2, 1}), Tensor({3, 1, 1}), Tensor({1})), revsent::ShapeError);
}

TEST(Conv1D, MatchesDirectSum) {
  Rng rng(2);
  const std::size_t B = 2, L = 7, C = 3, K = 3, F = 4;
  const Tensor x = random_tensor({B, L, C}, rng), k = random_tensor({K, C, F}, rng), b = random_tensor({F}, rng);
  const auto y = conv1d_forward(x, k, b);
  for (std::size_t bi = 0; bi < B; ++bi) {
    for (std::size_t t = 0; t + K <= L; ++t) {
      for (std::size_t f = 0; f < F; ++f) {
        double s = b[f];
        for (std::size_t dk = 0; dk < K; ++dk) {
          for (std::size_t c = 0; c < C; ++c) s += x[(bi * L + t + dk) * C + c] * k[(dk * C + c) * F + f];
        }
        EXPECT_NEAR(y[(bi * (L - K + 1) + t) * F + f], std::max(s, 0.0), 1e-12);
      }
    }
  }
}

TEST(Conv1D, GradientsMatchFiniteDifferences) {
  Rng rng(3);
  const std::size_t B = 2, L = 6, C = 3, K = 3, F = 4;
  Tensor x = random_tensor({B, L, C}, rng), k = random_tensor({K, C, F}, rng), b = random_tensor({F}, rng, 0.1);
  const Tensor w = random_tensor({B, L - K + 1, F}, rng);
  const auto out = conv1d_forward(x, k, b);
  Tensor gk(k.shape), gb(b.shape), gx;
  conv1d_backward(x, k, out, w, gk, gb, &gx);
  auto loss = [&] { return probe(conv1d_forward(x, k, b), w); };
  EXPECT_LT(max_rel_error(gk, numeric_grad(k, loss)), kRtol);
  EXPECT_LT(max_rel_error(gb, numeric_grad(b, loss)), kRtol);
  EXPECT_LT(max_rel_error(gx, numeric_grad(x, loss)), kRtol);
}

// ------------------------------------------------------------------ pooling

TEST(GlobalMaxPool, Examples) {
  const auto p = global_max_pool(Tensor({1, 2, 2}, {-1, 5, 3, 2}));
  EXPECT_EQ(p.out.data, (std::vector<double>{3, 5}));
  const auto one = global_max_pool(Tensor({1, 1, 3}, {1, -2, 3}));
  EXPECT_EQ(one.out.data, (std::vector<double>{1, -2, 3}));
  // tie: gradient goes to the first step
  const Tensor x({1, 2, 1}, {2, 2});
  const auto tie = global_max_pool(x);
  const auto dx = global_max_pool_backward(tie, x.shape, Tensor({1, 1}, {1.0}));
  EXPECT_EQ(dx.data, (std::vector<double>{1, 0}));
}

TEST(GlobalMaxPool, DominatesEverySliceAndRoutesGradient) {
  Rng rng(4);
  Tensor x = random_tensor({3, 5, 4}, rng);
  const auto p = global_max_pool(x);
  for (std::size_t b = 0; b < 3; ++b) {
    for (std::size_t t = 0; t < 5; ++t) {
      for (std::size_t f = 0; f < 4; ++f) EXPECT_GE(p.out[b * 4 + f], x[(b * 5 + t) * 4 + f]);
    }
  }
  const Tensor w = random_tensor({3, 4}, rng);
  const auto dx = global_max_pool_backward(p, x.shape, w);
  EXPECT_LT(max_rel_error(dx, numeric_grad(x, [&] { return probe(global_max_pool(x).out, w); })), kRtol);
}

// --------------------------------------------------------------------- lstm

TEST(Lstm, ZeroFixedPoint) {
  Rng rng(5);
  LstmParams p{Param("i", {3, 8}), Param("r", {2, 8}), Param("b", {8})};
  const auto tr = lstm_forward(Tensor({2, 4, 3}), p, Direction::Forward);
  for (double v : tr.hidden.data) EXPECT_EQ(v, 0.0);
  for (std::size_t n = 0; n < tr.gates.size(); n += 8) {
    EXPECT_EQ(tr.gates[n], 0.5);  // input gate
  }
}

TEST(Lstm, LengthOneDirectionsAgree) {
  Rng rng(6);
  const auto p = random_lstm(3, 4, rng);
  const Tensor x = random_tensor({2, 1, 3}, rng);
  EXPECT_EQ(lstm_forward(x, p, Direction::Forward).hidden, lstm_forward(x, p, Direction::Reverse).hidden);
}

TEST(Lstm, MatchesNaiveRecurrence) {
  Rng rng(7);
  const auto p = random_lstm(3, 4, rng);
  const Tensor x = random_tensor({2, 5, 3}, rng);
  for (bool reverse : {false, true}) {
    const auto tr = lstm_forward(x, p, reverse ? Direction::Reverse : Direction::Forward);
    for (std::size_t b = 0; b < 2; ++b) {
      const auto hs = naive_lstm(x, b, p, reverse);
      for (std::size_t t = 0; t < 5; ++t) {
        for (std::size_t u = 0; u < 4; ++u) EXPECT_NEAR(tr.hidden[(b * 5 + t) * 4 + u], hs[t][u], 1e-12);
      }
    }
  }
}

TEST(Lstm, BackpropThroughTimeMatchesFiniteDifferences) {
  Rng rng(8);
  for (auto dir : {Direction::Forward, Direction::Reverse}) {
    auto p = random_lstm(3, 4, rng);
    Tensor x = random_tensor({2, 3, 3}, rng);
    const Tensor w = random_tensor({2, 3, 4}, rng);
    const auto tr = lstm_forward(x, p, dir);
    const Tensor dx = lstm_backward(tr, p.input.value, p.recurrent.value, w, p.input.grad, p.recurrent.grad,
                                    p.bias.grad);
    auto loss = [&] { return probe(lstm_forward(x, p, dir).hidden, w); };
    EXPECT_LT(max_rel_error(p.input.grad, numeric_grad(p.input.value, loss)), kRtol);
    EXPECT_LT(max_rel_error(p.recurrent.grad, numeric_grad(p.recurrent.value, loss)), kRtol);
    EXPECT_LT(max_rel_error(p.bias.grad, numeric_grad(p.bias.value, loss)), kRtol);
    EXPECT_LT(max_rel_error(dx, numeric_grad(x, loss)), kRtol);
  }
}

TEST(BiLstm, ZeroWeightsGiveZeroOutput) {
  LstmParams f{Param("i", {4, 256}), Param("r", {64, 256}), Param("b", {256})};
  LstmParams r = f;
  Rng rng(9);
  const auto tr = bilstm_forward(random_tensor({2, 5, 4}, rng), f, r);
  EXPECT_EQ(tr.out.shape, (Shape{2, 128}));
  for (double v : tr.out.data) EXPECT_EQ(v, 0.0);
}

TEST(BiLstm, PalindromeWithTiedWeightsIsSymmetric) {
  Rng rng(10);
  const auto p = random_lstm(2, 3, rng);
  Tensor x({1, 5, 2});
  const double seq[5][2] = {{0.1, -0.4}, {0.7, 0.2}, {-0.3, 0.9}, {0.7, 0.2}, {0.1, -0.4}};
  for (std::size_t t = 0; t < 5; ++t) {
    x[t * 2] = seq[t][0];
    x[t * 2 + 1] = seq[t][1];
  }
  const auto tr = bilstm_forward(x, p, p);
  for (std::size_t u = 0; u < 3; ++u) EXPECT_DOUBLE_EQ(tr.out[u], tr.out[3 + u]);
}

TEST(BiLstm, MatchesNaiveAndFiniteDifferences) {
  Rng rng(11);
  auto f = random_lstm(3, 4, rng, "f");
  auto r = random_lstm(3, 4, rng, "r");
  Tensor x = random_tensor({2, 4, 3}, rng);
  const auto tr = bilstm_forward(x, f, r);
  for (std::size_t b = 0; b < 2; ++b) {
    const auto hf = naive_lstm(x, b, f, false);
    const auto hr = naive_lstm(x, b, r, true);
    for (std::size_t u = 0; u < 4; ++u) {
      EXPECT_NEAR(tr.out[b * 8 + u], hf[3][u], 1e-12);
      EXPECT_NEAR(tr.out[b * 8 + 4 + u], hr[0][u], 1e-12);
    }
  }
  const Tensor w = random_tensor({2, 8}, rng);
  const Tensor dx = bilstm_backward(tr, f, r, w);
  auto loss = [&] { return probe(bilstm_forward(x, f, r).out, w); };
  for (LstmParams* p : {&f, &r}) {
    EXPECT_LT(max_rel_error(p->input.grad, numeric_grad(p->input.value, loss)), kRtol);
    EXPECT_LT(max_rel_error(p->recurrent.grad, numeric_grad(p->recurrent.value, loss)), kRtol);
    EXPECT_LT(max_rel_error(p->bias.grad, numeric_grad(p->bias.value, loss)), kRtol);
  }
  EXPECT_LT(max_rel_error(dx, numeric_grad(x, loss)), kRtol);
}

// -------------------------------------------------------------------- dense

TEST(Dense, IdentityAndUniformSoftmax) {
  const Tensor x({2, 2}, {1, -2, 3, 4});
  EXPECT_EQ(dense_forward(x, Tensor({2, 2}, {1, 0, 0, 1}), Tensor({2}), Activation::None).data, x.data);
  const auto p = dense_forward(Tensor({1, 3}), Tensor({3, 3}), Tensor({3}), Activation::Softmax);
  for (double v : p.data) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);
  EXPECT_THROW(dense_forward(x, Tensor({3, 2}), Tensor({2}), Activation::None), revsent::ShapeError);
}

TEST(Dense, SoftmaxRowsSumToOne) {
  Rng rng(12);
  const auto y = dense_forward(random_tensor({20, 6}, rng, 30.0), random_tensor({6, 3}, rng, 5.0),
                               random_tensor({3}, rng), Activation::Softmax);
  for (std::size_t r = 0; r < 20; ++r) EXPECT_NEAR(y[r * 3] + y[r * 3 + 1] + y[r * 3 + 2], 1.0, 1e-12);
}

TEST(Dense, GradientsMatchFiniteDifferences) {
  Rng rng(13);
  for (auto act : {Activation::None, Activation::Relu, Activation::Softmax}) {
    Tensor x = random_tensor({3, 5}, rng), w = random_tensor({5, 4}, rng), b = random_tensor({4}, rng, 0.1);
    const Tensor probe_w = random_tensor({3, 4}, rng);
    const auto out = dense_forward(x, w, b, act);
    Tensor gw(w.shape), gb(b.shape);
    const Tensor dx = dense_backward(x, w, act, out, probe_w, gw, gb);
    auto loss = [&] { return probe(dense_forward(x, w, b, act), probe_w); };
    EXPECT_LT(max_rel_error(gw, numeric_grad(w, loss)), kRtol);
    EXPECT_LT(max_rel_error(gb, numeric_grad(b, loss)), kRtol);
    EXPECT_LT(max_rel_error(dx, numeric_grad(x, loss)), kRtol);
  }
}

// ------------------------------------------------------------------ dropout

TEST(Dropout, IdentityCases) {
  Rng rng(14);
  const Tensor x = random_tensor({4, 4}, rng);
  EXPECT_EQ(dropout(x, 0.5, Mode::Infer, &rng).out, x);
  EXPECT_EQ(dropout(x, 0.0, Mode::Train, &rng).out, x);
  EXPECT_EQ(dropout(x, 0.0, Mode::Infer, nullptr).out, x);
  EXPECT_THROW(dropout(x, 1.0, Mode::Train, &rng), revsent::Error);
}

TEST(Dropout, MeanPreservedInExpectation) {
  Rng rng(15);
  Tensor x({10000});
  for (auto& v : x.data) v = 1.0 + rng.uniform();
  const auto d = dropout(x, 0.5, Mode::Train, &rng);
  const double in = std::accumulate(x.data.begin(), x.data.end(), 0.0);
  const double out = std::accumulate(d.out.data.begin(), d.out.data.end(), 0.0);
  EXPECT_NEAR(out / in, 1.0, 0.05);
  std::size_t zeros = 0;
  for (double v : d.out.data) zeros += v == 0.0;
  EXPECT_NEAR(static_cast<double>(zeros) / 10000.0, 0.5, 0.03);
}

TEST(Dropout, BackwardUsesMask) {
  Rng rng(16);
  const Tensor x = random_tensor({50}, rng);
  const auto d = dropout(x, 0.3, Mode::Train, &rng);
  const auto g = dropout_backward(d, Tensor({50}, 1.0));
  for (std::size_t i = 0; i < 50; ++i) EXPECT_EQ(g[i] * x[i], d.out[i]);
}

// --------------------------------------------------------------------- loss

TEST(CrossEntropy, UniformAndStable) {
  const std::vector<int> t0 = {0}, t2 = {2};
  EXPECT_NEAR(softmax_crossentropy(Tensor({1, 3}), t2).loss, std::log(3.0), 1e-15);
  const auto big = softmax_crossentropy(Tensor({1, 3}, {1e6, 0, 0}), t0);
  EXPECT_NEAR(big.loss, 0.0, 1e-12);
  EXPECT_TRUE(big.grad.all_finite());
  const auto wrong = softmax_crossentropy(Tensor({1, 3}, {1e6, 0, 0}), t2);
  EXPECT_NEAR(wrong.loss, 1e6, 1e-6);
  const std::vector<int> bad = {3};
  EXPECT_THROW(softmax_crossentropy(Tensor({1, 3}), bad), revsent::IndexError);
}

TEST(CrossEntropy, GradientAndNonNegativity) {
  Rng rng(17);
  Tensor z = random_tensor({4, 3}, rng, 3.0);
  const std::vector<int> t = {0, 2, 1, 2};
  const auto r = softmax_crossentropy(z, t);
  EXPECT_GE(r.loss, 0.0);
  for (double l : r.row_losses) EXPECT_GE(l, 0.0);
  const auto num = numeric_grad(z, [&] { return softmax_crossentropy(z, t).loss; });
  EXPECT_LT(max_rel_error(r.grad, num), 1e-5);
}

// --------------------------------------------------------------------- adam

TEST(Adam, FirstStepHandValue) {
  Param p("theta", {1});
  p.value[0] = 1.0;
  p.grad[0] = 0.5;
  auto st = make_adam({&p});
  adam_step({&p}, st);
  // m_hat = g, v_hat = g^2, so the step is lr * g / (|g| + eps)
  EXPECT_NEAR(p.value[0], 1.0 - 1e-3 * 0.5 / (0.5 + 1e-7), 1e-15);
  EXPECT_NEAR(p.value[0], 0.999, 1e-9);
  EXPECT_EQ(st.t, 1u);
}

TEST(Adam, ZeroGradientIsNoOpAndEqualGradsEqualSteps) {
  Param a("a", {3}), b("b", {2});
  a.value = Tensor({3}, {1, 2, 3});
  b.value = Tensor({2}, {5, 5});
  auto st = make_adam({&a, &b});
  const auto before = a.value;
  adam_step({&a, &b}, st);
  EXPECT_EQ(a.value, before);
  EXPECT_EQ(st.t, 1u);
  b.grad = Tensor({2}, {0.3, 0.3});
  for (int i = 0; i < 5; ++i) adam_step({&a, &b}, st);
  EXPECT_EQ(b.value[0], b.value[1]);
  EXPECT_LT(b.value[0], 5.0);
}

TEST(Adam, MatchesReferenceLoop) {
  Param p("w", {1});
  p.value[0] = 0.2;
  auto st = make_adam({&p});
  double theta = 0.2, m = 0, v = 0;
  for (int t = 1; t <= 20; ++t) {
    const double g = std::sin(t) * 0.7;
    p.grad[0] = g;
    adam_step({&p}, st);
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g * g;
    theta -= 1e-3 * (m / (1 - std::pow(0.9, t))) / (std::sqrt(v / (1 - std::pow(0.999, t))) + 1e-7);
  }
  EXPECT_NEAR(p.value[0], theta, 1e-15);
}

// --------------------------------------------------------------------- init

TEST(Init, OrthogonalRows) {
  Rng rng(18);
  Tensor r({4, 16});
  init::orthogonal(r, rng);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < 16; ++k) dot += r[i * 16 + k] * r[j * 16 + k];
      EXPECT_NEAR(dot, i == j ? 1.0 : 0.0, 1e-12);
    }
  }
}

TEST(Init, GlorotBounds) {
  Rng rng(19);
  Tensor w({40, 10});
  init::glorot_uniform(w, 40, 10, rng);
  const double lim = std::sqrt(6.0 / 50.0);
  for (double v : w.data) EXPECT_LE(std::abs(v), lim);
}

// ------------------------------------------------------------ grad checker

TEST(GradCheck, ReportsWorstBlock) {
  Param a("good", {3}), b("bad", {2});
  a.value = Tensor({3}, {0.1, 0.2, 0.3});
  b.value = Tensor({2}, {0.4, -0.5});
  auto loss = [&] {
    double s = 0;
    for (double v : a.value.data) s += v * v;
    for (double v : b.value.data) s += v * v * v;
    return s;
  };
  auto right = [&] {
    for (std::size_t i = 0; i < 3; ++i) a.grad[i] = 2 * a.value[i];
    for (std::size_t i = 0; i < 2; ++i) b.grad[i] = 3 * b.value[i] * b.value[i];
  };
  EXPECT_TRUE(grad_check({&a, &b}, loss, right).passed);
  auto wrong = [&] {
    right();
    b.grad[1] *= 1.01;
  };
  const auto rep = grad_check({&a, &b}, loss, wrong);
  EXPECT_FALSE(rep.passed);
  EXPECT_EQ(rep.worst_block, "bad");
  EXPECT_NE(rep.summary().find("FAIL"), std::string::npos);
}

// --------------------------------------------------------------- checkpoint

TEST(Checkpoint, RoundTripAndCorruption) {
  Rng rng(20);
  checkpoint::Checkpoint c{"cnn-v1", {{"a/w", random_tensor({2, 3}, rng)}, {"b", random_tensor({4}, rng)}}};
  const auto bytes = checkpoint::serialize(c);
  EXPECT_EQ(bytes.substr(0, 8), std::string("REVSENT\0", 8));
  const auto back = checkpoint::deserialize(bytes);
  EXPECT_EQ(back.architecture, "cnn-v1");
  ASSERT_EQ(back.blocks.size(), 2u);
  EXPECT_EQ(back.blocks[0].name, "a/w");
  EXPECT_EQ(back.blocks[0].value, c.blocks[0].value);
  EXPECT_EQ(back.blocks[1].value, c.blocks[1].value);

  auto flipped = bytes;
  flipped[bytes.size() - 12] ^= 0x01;
  EXPECT_THROW(checkpoint::deserialize(flipped), revsent::IoError);
  EXPECT_THROW(checkpoint::deserialize(bytes.substr(0, bytes.size() - 3)), revsent::IoError);
  EXPECT_THROW(checkpoint::deserialize(bytes + "x"), revsent::IoError);
  EXPECT_THROW(checkpoint::deserialize("NOTACKPT"), revsent::IoError);
}

TEST(Tensor, NonFiniteIsHardError) {
  Tensor x({1, 2}, {std::nan(""), 0.0});
  EXPECT_THROW(dense_forward(x, Tensor({2, 1}, {1, 1}), Tensor({1}), Activation::None), revsent::NumericError);
  EXPECT_THROW(Tensor({2, 2}, std::vector<double>{1, 2, 3}), revsent::ShapeError);
}
