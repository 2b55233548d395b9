#include "mbt/nn/lstm.hpp"

#include <cmath>

#include "mbt/common/errors.hpp"
#include "mbt/nn/activations.hpp"

namespace mbt::nn {
namespace {

Matrix UniformMatrix(int rows, int cols, double bound, Rng& rng) {
  Matrix m(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) m(r, c) = UniformReal(rng, -bound, bound);
  }
  return m;
}

}  // namespace

LstmLayer::LstmLayer(const std::string& name, int input, int hidden, Rng& rng)
    : input_size(input), hidden_size(hidden) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
  weight = Parameter(name + ".weight", UniformMatrix(4 * hidden, input + hidden, bound, rng));
  bias = Parameter(name + ".bias", UniformMatrix(4 * hidden, 1, bound, rng));
}

void LstmStep(const LstmLayer& layer, const Matrix& x, LstmState& state) {
  const int hs = layer.hidden_size;
  if (x.rows() != layer.input_size) {
    throw ShapeError(layer.weight.name + ": input has " + std::to_string(x.rows()) +
                     " rows, expected " + std::to_string(layer.input_size));
  }
  if (state.h.rows() != hs || state.h.cols() != x.cols()) {
    throw ShapeError(layer.weight.name + ": hidden state shape mismatch");
  }
  Matrix stacked(layer.input_size + hs, x.cols());
  stacked << x, state.h;
  Matrix gates = layer.weight.value * stacked;
  gates.colwise() += layer.bias.value.col(0);
  const Eigen::ArrayXXd in = SigmoidOf(gates.topRows(hs).array());
  const Eigen::ArrayXXd forget = SigmoidOf(gates.middleRows(hs, hs).array());
  const Eigen::ArrayXXd cell = TanhOf(gates.middleRows(2 * hs, hs).array());
  const Eigen::ArrayXXd out = SigmoidOf(gates.bottomRows(hs).array());
  state.c = in * cell + forget * state.c.array();
  state.h = out * TanhOf(state.c.array());
}

TapeLstmState LstmStep(Tape& tape, LstmLayer& layer, Tape::Var x, TapeLstmState state) {
  const int hs = layer.hidden_size;
  if (tape.value(x).rows() != layer.input_size) {
    throw ShapeError(layer.weight.name + ": input has " +
                     std::to_string(tape.value(x).rows()) + " rows, expected " +
                     std::to_string(layer.input_size));
  }
  const Tape::Var out = tape.LstmCell(x, state.h, state.c, tape.Param(&layer.weight),
                                      tape.Param(&layer.bias));
  TapeLstmState next;
  next.h = tape.RowSlice(out, 0, hs);
  next.c = tape.RowSlice(out, hs, hs);
  return next;
}

Linear::Linear(const std::string& name, int in, int out, Rng& rng, double gain) {
  const double bound = gain / std::sqrt(static_cast<double>(in));
  weight = Parameter(name + ".weight", UniformMatrix(out, in, bound, rng));
  bias = Parameter(name + ".bias", Matrix::Zero(out, 1));
}

Matrix Linear::Apply(const Matrix& x) const {
  if (x.rows() != weight.value.cols()) throw ShapeError(weight.name + ": input size mismatch");
  Matrix y = weight.value * x;
  y.colwise() += bias.value.col(0);
  return y;
}

Tape::Var Linear::Apply(Tape& tape, Tape::Var x) {
  return tape.AddBias(tape.MatMul(tape.Param(&weight), x), tape.Param(&bias));
}

}  // namespace mbt::nn
