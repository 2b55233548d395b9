#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <vector>

#include <gtest/gtest.h>

#include "mbt/common/errors.hpp"
#include "mbt/nn/adam.hpp"
#include "mbt/nn/checkpoint.hpp"
#include "mbt/nn/normalizer.hpp"
#include "mbt/nn/policy.hpp"
#include "mbt/nn/tape.hpp"
#include "grad_check.hpp"

namespace mbt::nn {
namespace {

using testing::MaxRelativeError;
using testing::RandomMatrix;
using testing::SequenceLoss;

// Scalar re-implementation of the two-layer LSTM and head, written with
// plain loops over std::vector.
struct ScalarNet {
  struct Layer {
    int in = 0;
    int hidden = 0;
    std::vector<std::vector<double>> w;
    std::vector<double> b;
    std::vector<double> h;
    std::vector<double> c;
  };
  Layer l1, l2;
  std::vector<std::vector<double>> head_w;
  std::vector<double> head_b;

  static Layer Copy(const LstmLayer& src) {
    Layer out;
    out.in = src.input_size;
    out.hidden = src.hidden_size;
    out.w.assign(src.weight.value.rows(), std::vector<double>(src.weight.value.cols()));
    for (int r = 0; r < src.weight.value.rows(); ++r) {
      for (int c = 0; c < src.weight.value.cols(); ++c) out.w[r][c] = src.weight.value(r, c);
    }
    out.b.resize(src.bias.value.rows());
    for (int r = 0; r < src.bias.value.rows(); ++r) out.b[r] = src.bias.value(r, 0);
    out.h.assign(out.hidden, 0.0);
    out.c.assign(out.hidden, 0.0);
    return out;
  }

  explicit ScalarNet(const RecurrentNet& net) : l1(Copy(net.lstm1)), l2(Copy(net.lstm2)) {
    const Matrix& w = net.head.weight.value;
    head_w.assign(w.rows(), std::vector<double>(w.cols()));
    for (int r = 0; r < w.rows(); ++r) {
      for (int c = 0; c < w.cols(); ++c) head_w[r][c] = w(r, c);
    }
    for (int r = 0; r < net.head.bias.value.rows(); ++r) head_b.push_back(net.head.bias.value(r, 0));
  }

  static double Sig(double v) { return 1.0 / (1.0 + std::exp(-v)); }

  static void Cell(Layer& l, const std::vector<double>& x) {
    const int hs = l.hidden;
    std::vector<double> z(4 * hs);
    for (int r = 0; r < 4 * hs; ++r) {
      double acc = l.b[r];
      for (int k = 0; k < l.in; ++k) acc += l.w[r][k] * x[k];
      for (int k = 0; k < hs; ++k) acc += l.w[r][l.in + k] * l.h[k];
      z[r] = acc;
    }
    for (int k = 0; k < hs; ++k) {
      const double i = Sig(z[k]);
      const double f = Sig(z[hs + k]);
      const double g = std::tanh(z[2 * hs + k]);
      const double o = Sig(z[3 * hs + k]);
      l.c[k] = f * l.c[k] + i * g;
      l.h[k] = o * std::tanh(l.c[k]);
    }
  }

  std::vector<double> Step(const std::vector<double>& x) {
    Cell(l1, x);
    Cell(l2, l1.h);
    std::vector<double> y(head_b);
    for (std::size_t r = 0; r < y.size(); ++r) {
      for (int k = 0; k < l2.hidden; ++k) y[r] += head_w[r][k] * l2.h[k];
    }
    return y;
  }
};

TEST(Tape, LinearGradientIsOuterProduct) {
  Rng rng(1);
  Parameter w("w", RandomMatrix(3, 4, rng));
  const Matrix x = RandomMatrix(4, 1, rng);
  const Matrix target = RandomMatrix(3, 1, rng);
  Tape tape;
  const auto y = tape.MatMul(tape.Param(&w), tape.Constant(x));
  const auto loss = tape.Scale(tape.Sum(tape.Square(tape.Sub(y, tape.Constant(target)))), 0.5);
  tape.Backward(loss);
  const Matrix error = w.value * x - target;
  EXPECT_LT((w.grad - error * x.transpose()).norm(), 1e-14);
}

TEST(Tape, BackwardTwiceIsUsageError) {
  Parameter w("w", Matrix::Ones(2, 2));
  Tape tape;
  const auto loss = tape.Sum(tape.Param(&w));
  tape.Backward(loss);
  EXPECT_THROW(tape.Backward(loss), UsageError);
  EXPECT_THROW(tape.Sum(tape.Constant(Matrix::Ones(1, 1))), UsageError);
  tape.Clear();
  EXPECT_NO_THROW(tape.Backward(tape.Sum(tape.Param(&w))));
}

TEST(Tape, DisconnectedParameterHasZeroGradient) {
  Parameter used("used", Matrix::Ones(2, 1));
  Parameter unused("unused", Matrix::Ones(2, 1));
  Tape tape;
  tape.Param(&unused);
  tape.Backward(tape.Sum(tape.Square(tape.Param(&used))));
  EXPECT_EQ(unused.grad, Matrix::Zero(2, 1));
  EXPECT_EQ(used.grad, Matrix::Constant(2, 1, 2.0));
}

TEST(Tape, GradientsAccumulateAcrossUses) {
  Parameter w("w", Matrix::Constant(1, 1, 3.0));
  Tape tape;
  const auto a = tape.Param(&w);
  tape.Backward(tape.Sum(tape.Add(tape.Mul(a, a), a)));  // w^2 + w
  EXPECT_DOUBLE_EQ(w.grad(0, 0), 7.0);
}

TEST(Tape, ShapeErrors) {
  Tape tape;
  const auto a = tape.Constant(Matrix::Ones(2, 3));
  const auto b = tape.Constant(Matrix::Ones(2, 2));
  EXPECT_THROW(tape.MatMul(a, a), ShapeError);
  EXPECT_THROW(tape.Add(a, b), ShapeError);
  EXPECT_THROW(tape.RowSlice(a, 1, 2), ShapeError);
  EXPECT_THROW(tape.Backward(a), ShapeError);
}

// Central finite differences on every entry of the given parameters.
TEST(GradientCheck, ElementwiseOpsOnRandomShapes) {
  for (int seed = 0; seed < 20; ++seed) {
    Rng rng(100 + seed);
    const int rows = UniformInt(rng, 1, 5);
    const int cols = UniformInt(rng, 1, 4);
    Parameter a("a", RandomMatrix(rows, cols, rng));
    Parameter b("b", RandomMatrix(rows, cols, rng));
    Parameter bias("bias", RandomMatrix(rows, 1, rng));
    Parameter pos("pos", (RandomMatrix(rows, cols, rng).array().abs() + 0.5).matrix());
    const Matrix weights = RandomMatrix(rows, cols, rng);
    auto loss = [&](Tape& t) {
      const auto va = t.Param(&a);
      const auto vb = t.Param(&b);
      auto x = t.Add(t.Sigmoid(va), t.Mul(t.Tanh(vb), va));
      x = t.Add(x, t.Exp(t.Scale(vb, 0.3)));
      x = t.Add(x, t.Log(t.Param(&pos)));
      x = t.Sub(x, t.Min(va, vb));
      x = t.Add(x, t.Clamp(t.AddScalar(va, 0.1), -0.7, 0.7));
      x = t.AddBias(x, t.Param(&bias));
      x = t.Add(x, t.BroadcastCols(t.Param(&bias), cols));
      const auto stacked = t.ConcatRows({x, t.Square(va)});
      const auto back = t.RowSlice(stacked, rows, rows);
      const auto joined = t.ConcatCols({x, back});
      return t.Add(t.Mean(t.SumRows(t.Square(joined))), t.Sum(t.Mul(x, t.Constant(weights))));
    };
    EXPECT_LE(MaxRelativeError({&a, &b, &bias, &pos}, loss, 1e-5, 100, rng), 1e-4)
        << "seed " << seed;
  }
}

TEST(GradientCheck, LinearAndSingleLstmOnRandomShapes) {
  for (int seed = 0; seed < 10; ++seed) {
    Rng rng(200 + seed);
    const int in = UniformInt(rng, 1, 6);
    const int hidden = UniformInt(rng, 1, 5);
    const int batch = UniformInt(rng, 1, 3);
    const int steps = UniformInt(rng, 1, 5);
    LstmLayer cell("cell", in, hidden, rng);
    Linear head("head", hidden, 2, rng);
    head.bias.value = RandomMatrix(2, 1, rng);
    std::vector<Matrix> xs;
    for (int t = 0; t < steps; ++t) xs.push_back(RandomMatrix(in, batch, rng));
    const Matrix target = RandomMatrix(2, batch, rng);
    auto loss = [&](Tape& t) {
      TapeLstmState s{t.Constant(Matrix::Zero(hidden, batch)),
                      t.Constant(Matrix::Zero(hidden, batch))};
      for (const Matrix& x : xs) s = LstmStep(t, cell, t.Constant(x), s);
      const auto y = head.Apply(t, s.h);
      return t.Sum(t.Square(t.Sub(y, t.Constant(target))));
    };
    EXPECT_LE(MaxRelativeError({&cell.weight, &cell.bias, &head.weight, &head.bias}, loss,
                               1e-5, 200, rng),
              1e-4)
        << "seed " << seed;
  }
}

// Cell built from primitive tape ops; reference for the fused op.
TapeLstmState ComposedLstmStep(Tape& t, LstmLayer& layer, Tape::Var x, TapeLstmState s) {
  const int hs = layer.hidden_size;
  const auto gates = t.AddBias(t.MatMul(t.Param(&layer.weight), t.ConcatRows({x, s.h})),
                               t.Param(&layer.bias));
  const auto i = t.Sigmoid(t.RowSlice(gates, 0, hs));
  const auto f = t.Sigmoid(t.RowSlice(gates, hs, hs));
  const auto g = t.Tanh(t.RowSlice(gates, 2 * hs, hs));
  const auto o = t.Sigmoid(t.RowSlice(gates, 3 * hs, hs));
  TapeLstmState next;
  next.c = t.Add(t.Mul(f, s.c), t.Mul(i, g));
  next.h = t.Mul(o, t.Tanh(next.c));
  return next;
}

TEST(Tape, FusedLstmCellMatchesComposedCell) {
  for (int seed = 0; seed < 5; ++seed) {
    Rng rng(400 + seed);
    LstmLayer layer("cell", 5, 4, rng);
    Parameter x0("x0", RandomMatrix(5, 3, rng));
    Parameter h0("h0", RandomMatrix(4, 3, rng, 0.5));
    Parameter c0("c0", RandomMatrix(4, 3, rng, 0.5));
    const Matrix weights = RandomMatrix(8, 3, rng);
    std::vector<Matrix> grads[2];
    Matrix outputs[2];
    for (int fused = 0; fused < 2; ++fused) {
      for (Parameter* p : {&layer.weight, &layer.bias, &x0, &h0, &c0}) p->ZeroGrad();
      Tape t;
      TapeLstmState s{t.Param(&h0), t.Param(&c0)};
      const auto x = t.Param(&x0);
      for (int k = 0; k < 3; ++k) {
        s = fused ? LstmStep(t, layer, x, s) : ComposedLstmStep(t, layer, x, s);
      }
      const auto out = t.ConcatRows({s.h, s.c});
      outputs[fused] = t.value(out);
      t.Backward(t.Sum(t.Mul(t.Tanh(out), t.Constant(weights))));
      for (Parameter* p : {&layer.weight, &layer.bias, &x0, &h0, &c0}) grads[fused].push_back(p->grad);
    }
    EXPECT_LT((outputs[0] - outputs[1]).cwiseAbs().maxCoeff(), 1e-14);
    for (std::size_t k = 0; k < grads[0].size(); ++k) {
      EXPECT_LT((grads[0][k] - grads[1][k]).cwiseAbs().maxCoeff(), 1e-13) << "param " << k;
    }
  }
}

TEST(GradientCheck, FullPolicyBpttOver16Steps) {
  constexpr int kSteps = 16;
  constexpr int kBatch = 2;
  double worst = 0.0;
  for (int seed = 0; seed < 50; ++seed) {
    Rng rng(1000 + seed);
    PolicyNet net(seed);
    // Larger head weights than the default init so the actor head does not
    // mask the recurrent gradients.
    net.actor.head.weight.value = RandomMatrix(kActionDim, kPolicyHidden, rng, 0.2);
    std::vector<Matrix> obs, actions, adv, returns;
    for (int t = 0; t < kSteps; ++t) {
      obs.push_back(RandomMatrix(kPolicyInput, kBatch, rng));
      actions.push_back(RandomMatrix(kActionDim, kBatch, rng, 0.5));
      adv.push_back(RandomMatrix(1, kBatch, rng));
      returns.push_back(RandomMatrix(1, kBatch, rng));
    }
    auto loss = [&](Tape& t) { return SequenceLoss(t, net, obs, actions, adv, returns); };
    const double err = MaxRelativeError(net.Parameters(), loss, 1e-5, 6, rng);
    worst = std::max(worst, err);
    EXPECT_LE(err, 1e-4) << "seed " << seed;
  }
  RecordProperty("max_relative_error", std::to_string(worst));
}

TEST(Policy, MatchesScalarLoopOracle) {
  for (int seed = 0; seed < 5; ++seed) {
    Rng rng(300 + seed);
    PolicyNet net(seed);
    net.actor.head.weight.value = RandomMatrix(kActionDim, kPolicyHidden, rng, 0.3);
    net.actor.head.bias.value = RandomMatrix(kActionDim, 1, rng);
    net.critic.head.bias.value = RandomMatrix(1, 1, rng);
    std::vector<Matrix> obs;
    for (int t = 0; t < 20; ++t) obs.push_back(RandomMatrix(kPolicyInput, 1, rng, 2.0));
    const SequenceOutput out = net.ForwardSequence(obs, net.InitialState(1));
    ScalarNet actor(net.actor);
    ScalarNet critic(net.critic);
    for (int t = 0; t < 20; ++t) {
      std::vector<double> x(obs[t].data(), obs[t].data() + kPolicyInput);
      const std::vector<double> mean = actor.Step(x);
      const std::vector<double> value = critic.Step(x);
      for (int k = 0; k < kActionDim; ++k) EXPECT_NEAR(out.means[t](k, 0), mean[k], 1e-12);
      EXPECT_NEAR(out.values[t](0, 0), value[0], 1e-12);
    }
  }
}

TEST(Policy, TapeForwardMatchesPlainForward) {
  Rng rng(7);
  PolicyNet net(7);
  std::vector<Matrix> obs;
  for (int t = 0; t < 10; ++t) obs.push_back(RandomMatrix(kPolicyInput, 3, rng));
  const PolicyState init = net.InitialState(3);
  const SequenceOutput plain = net.ForwardSequence(obs, init);
  Tape tape;
  const TapeSequence taped = net.ForwardSequence(tape, obs, init);
  for (int t = 0; t < 10; ++t) {
    EXPECT_LT((tape.value(taped.means[t]) - plain.means[t]).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((tape.value(taped.values[t]) - plain.values[t]).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Policy, ZeroWeightsGiveHeadBias) {
  PolicyNet net(3);
  for (Parameter* p : net.Parameters()) p->value.setZero();
  net.actor.head.bias.value = Eigen::VectorXd::LinSpaced(kActionDim, -1.0, 1.0);
  net.critic.head.bias.value(0, 0) = 0.25;
  PolicyState state = net.InitialState(1);
  Matrix mean, value;
  net.Step(Matrix::Zero(kPolicyInput, 1), state, &mean, &value);
  EXPECT_EQ(mean, net.actor.head.bias.value);
  EXPECT_EQ(value(0, 0), 0.25);
  EXPECT_EQ(state.actor.layer1.c, Matrix::Zero(kPolicyHidden, 1));
  EXPECT_EQ(state.actor.layer2.h, Matrix::Zero(kPolicyHidden, 1));
}

TEST(Policy, LengthOneSequenceEqualsSingleStep) {
  Rng rng(4);
  PolicyNet net(4);
  const Matrix x = RandomMatrix(kPolicyInput, 2, rng);
  PolicyState state = net.InitialState(2);
  Matrix mean, value;
  net.Step(x, state, &mean, &value);
  const SequenceOutput seq = net.ForwardSequence({x}, net.InitialState(2));
  EXPECT_EQ(seq.means[0], mean);
  EXPECT_EQ(seq.values[0], value);
  EXPECT_EQ(seq.final_state.actor.layer2.h, state.actor.layer2.h);
}

TEST(Policy, ShapesAndInitialization) {
  PolicyNet net(5);
  EXPECT_EQ(net.actor.lstm1.weight.value.rows(), 4 * 64);
  EXPECT_EQ(net.actor.lstm1.weight.value.cols(), 26 + 64);
  EXPECT_EQ(net.actor.lstm2.weight.value.cols(), 128);
  EXPECT_EQ(net.actor.head.weight.value.rows(), 10);
  EXPECT_EQ(net.critic.head.weight.value.rows(), 1);
  EXPECT_EQ(net.log_std.value, Matrix::Constant(10, 1, -0.5));
  EXPECT_EQ(net.Parameters().size(), 13u);
  PolicyState state = net.InitialState(1);
  EXPECT_THROW(net.Step(Matrix::Zero(25, 1), state, nullptr, nullptr), ShapeError);
  EXPECT_THROW(net.ForwardSequence({Matrix::Zero(27, 1)}, net.InitialState(1)), ShapeError);
}

TEST(Policy, DeterministicForSeed) {
  Rng rng(6);
  const Matrix x = RandomMatrix(kPolicyInput, 1, rng);
  PolicyNet a(11), b(11), c(12);
  const auto out_a = a.ForwardSequence({x, x, x}, a.InitialState(1));
  const auto out_b = b.ForwardSequence({x, x, x}, b.InitialState(1));
  const auto out_c = c.ForwardSequence({x, x, x}, c.InitialState(1));
  EXPECT_EQ(out_a.means[2], out_b.means[2]);
  EXPECT_NE(out_a.means[2], out_c.means[2]);
}

TEST(Policy, BatchColumnsAreIndependent) {
  Rng rng(8);
  PolicyNet net(8);
  const Matrix x = RandomMatrix(kPolicyInput, 3, rng);
  PolicyState batch_state = net.InitialState(3);
  Matrix batch_mean;
  net.Step(x, batch_state, &batch_mean, nullptr);
  for (int c = 0; c < 3; ++c) {
    PolicyState single = net.InitialState(1);
    Matrix mean;
    net.Step(x.col(c), single, &mean, nullptr);
    EXPECT_LT((mean - batch_mean.col(c)).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(Gaussian, LogProbMatchesScalarFormula) {
  Rng rng(9);
  const Matrix mean = RandomMatrix(10, 3, rng);
  const Matrix log_std = RandomMatrix(10, 1, rng, 0.3);
  const Matrix action = RandomMatrix(10, 3, rng);
  const Eigen::RowVectorXd lp = GaussianLogProb(mean, log_std, action);
  for (int c = 0; c < 3; ++c) {
    double expected = 0.0;
    for (int r = 0; r < 10; ++r) {
      const double s = std::exp(log_std(r, 0));
      const double z = (action(r, c) - mean(r, c)) / s;
      expected += -0.5 * z * z - std::log(s) - 0.5 * std::log(2.0 * M_PI);
    }
    EXPECT_NEAR(lp(c), expected, 1e-12);
  }
  double entropy = 0.0;
  for (int r = 0; r < 10; ++r) {
    entropy += 0.5 * std::log(2.0 * M_PI * M_E * std::exp(2.0 * log_std(r, 0)));
  }
  EXPECT_NEAR(GaussianEntropy(log_std), entropy, 1e-12);
}

TEST(Gaussian, SampleMomentsMatch) {
  Rng rng(10);
  const Matrix mean = Matrix::Constant(10, 1, 0.3);
  const Matrix log_std = Matrix::Constant(10, 1, -0.5);
  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double v = SampleGaussian(mean, log_std, rng)(4, 0);
    sum += v;
    sq += v * v;
  }
  const double m = sum / n;
  EXPECT_NEAR(m, 0.3, 0.01);
  EXPECT_NEAR(std::sqrt(sq / n - m * m), std::exp(-0.5), 0.01);
}

TEST(Adam, ClipScalesToMaxNorm) {
  Parameter a("a", Matrix::Zero(2, 1));
  Parameter b("b", Matrix::Zero(1, 1));
  a.grad << 0.3, 0.0;
  b.grad << 0.4;  // joint norm 0.5
  const double norm = ClipGlobalNorm({&a, &b}, 0.05);
  EXPECT_DOUBLE_EQ(norm, 0.5);
  EXPECT_NEAR(a.grad(0, 0), 0.03, 1e-15);
  EXPECT_NEAR(b.grad(0, 0), 0.04, 1e-15);
  a.grad << 0.01, 0.0;
  b.grad << 0.0;
  ClipGlobalNorm({&a, &b}, 0.05);
  EXPECT_EQ(a.grad(0, 0), 0.01);
}

TEST(Adam, FirstStepClosedForm) {
  Parameter p("p", Matrix::Zero(3, 1));
  p.value << 1.0, -2.0, 0.5;
  const Matrix start = p.value;
  p.grad << 0.01, -0.02, 0.0;  // norm below the clip threshold
  AdamConfig cfg;
  Adam adam({&p}, cfg);
  adam.Step();
  for (int i = 0; i < 3; ++i) {
    const double g = std::vector<double>{0.01, -0.02, 0.0}[i];
    // m_hat = g, v_hat = g^2 after bias correction.
    const double expected = start(i, 0) - cfg.lr * g / (std::abs(g) + cfg.eps);
    EXPECT_NEAR(p.value(i, 0), expected, 1e-15);
  }
  EXPECT_EQ(adam.steps(), 1);
}

TEST(Adam, FirstStepAfterClipping) {
  Parameter p("p", Matrix::Zero(2, 1));
  p.grad << 3.0, 4.0;
  AdamConfig cfg;
  Adam adam({&p}, cfg);
  const double norm = adam.Step();
  EXPECT_DOUBLE_EQ(norm, 5.0);
  // Clipped gradient (0.03, 0.04) has the same sign, so each entry moves by
  // lr * g / (|g| + eps).
  EXPECT_NEAR(p.value(0, 0), -cfg.lr * 0.03 / (0.03 + cfg.eps), 1e-15);
  EXPECT_NEAR(p.value(1, 0), -cfg.lr * 0.04 / (0.04 + cfg.eps), 1e-15);
}

TEST(Adam, ZeroGradientZeroUpdate) {
  Parameter p("p", Matrix::Constant(2, 2, 1.5));
  Adam adam({&p});
  for (int i = 0; i < 3; ++i) adam.Step();
  EXPECT_EQ(p.value, Matrix::Constant(2, 2, 1.5));
}

TEST(Adam, NonFiniteGradientNamesParameter) {
  Parameter good("good", Matrix::Zero(1, 1));
  Parameter bad("actor.lstm1.weight", Matrix::Zero(2, 1));
  bad.grad(1, 0) = std::nan("");
  Adam adam({&good, &bad});
  try {
    adam.Step();
    FAIL() << "expected TrainingFault";
  } catch (const TrainingFault& e) {
    EXPECT_NE(std::string(e.what()).find("actor.lstm1.weight"), std::string::npos);
  }
  EXPECT_EQ(good.value(0, 0), 0.0);
}

TEST(Normalizer, MergedStatisticsMatchConcatenation) {
  Rng rng(12);
  const Matrix a = RandomMatrix(4, 50, rng, 3.0);
  const Matrix b = (RandomMatrix(4, 70, rng).array() + 2.0).matrix();
  RunningNormalizer norm(4);
  norm.Update(a);
  norm.Update(b);
  Matrix all(4, 120);
  all << a, b;
  const Eigen::VectorXd mean = all.rowwise().mean();
  const Eigen::VectorXd var = (all.colwise() - mean).array().square().rowwise().mean();
  EXPECT_LT((norm.mean() - mean).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((norm.var() - var).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(norm.count(), 120.0);
  const Matrix z = norm.Normalize(all);
  EXPECT_LT(z.rowwise().mean().cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Normalizer, FreshNormalizerIsIdentityAndClips) {
  RunningNormalizer norm(2);
  Matrix x(2, 1);
  x << 0.5, 50.0;
  const Matrix z = norm.Normalize(x);
  EXPECT_NEAR(z(0, 0), 0.5, 1e-8);
  EXPECT_EQ(z(1, 0), 10.0);
  EXPECT_THROW(norm.Normalize(Matrix::Zero(3, 1)), ShapeError);
}

TEST(Checkpoint, RoundTripIsBitwise) {
  Rng rng(13);
  PolicyNet net(13);
  for (Parameter* p : net.Parameters()) p->grad = RandomMatrix(p->value.rows(), p->value.cols(), rng);
  Adam adam(net.Parameters());
  adam.Step();
  RunningNormalizer norm(kPolicyInput);
  norm.Update(RandomMatrix(kPolicyInput, 30, rng));

  Checkpoint ckpt;
  StorePolicy(ckpt, net);
  StoreOptimizer(ckpt, adam);
  StoreNormalizer(ckpt, norm);
  ckpt.meta["stage"] = 3;
  const auto path = std::filesystem::temp_directory_path() / "mbt_nn_test.ckpt";
  SaveCheckpoint(path, ckpt);
  const Checkpoint loaded = LoadCheckpoint(path);

  PolicyNet net2(99);
  Adam adam2(net2.Parameters());
  RunningNormalizer norm2(kPolicyInput);
  RestorePolicy(loaded, net2);
  RestoreOptimizer(loaded, adam2);
  RestoreNormalizer(loaded, norm2);
  EXPECT_EQ(loaded.meta["stage"], 3);
  const auto p1 = net.Parameters();
  const auto p2 = net2.Parameters();
  for (std::size_t i = 0; i < p1.size(); ++i) {
    EXPECT_EQ(p1[i]->value, p2[i]->value) << p1[i]->name;
    EXPECT_EQ(adam.first_moments()[i], adam2.first_moments()[i]);
    EXPECT_EQ(adam.second_moments()[i], adam2.second_moments()[i]);
  }
  EXPECT_EQ(adam2.steps(), 1);
  EXPECT_EQ(norm.mean(), norm2.mean());
  EXPECT_EQ(norm.var(), norm2.var());
  EXPECT_EQ(norm.count(), norm2.count());
  std::filesystem::remove(path);
}

TEST(Checkpoint, MismatchedShapesAndCorruptFilesAreConfigErrors) {
  PolicyNet small(1, kPolicyInput, 8);
  Checkpoint ckpt;
  StorePolicy(ckpt, small);
  PolicyNet full(2);
  EXPECT_THROW(RestorePolicy(ckpt, full), ConfigError);
  RunningNormalizer wrong(20);
  Checkpoint with_norm;
  StoreNormalizer(with_norm, wrong);
  RunningNormalizer right(kPolicyInput);
  EXPECT_THROW(RestoreNormalizer(with_norm, right), ConfigError);

  const auto path = std::filesystem::temp_directory_path() / "mbt_nn_corrupt.ckpt";
  {
    std::ofstream out(path, std::ios::binary);
    out << "not a checkpoint";
  }
  EXPECT_THROW(LoadCheckpoint(path), ConfigError);
  EXPECT_THROW(LoadCheckpoint(path.string() + ".missing"), ConfigError);
  SaveCheckpoint(path, ckpt);
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 10);
  EXPECT_THROW(LoadCheckpoint(path), ConfigError);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace mbt::nn
