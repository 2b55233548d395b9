#ifndef MBT_NN_LSTM_HPP_
#define MBT_NN_LSTM_HPP_

#include <string>

#include "mbt/common/random.hpp"
#include "mbt/nn/tape.hpp"

namespace mbt::nn {

// Single LSTM cell. Fused gate rows are ordered input, forget, cell, output
// and act on the stacked column [x; h].
struct LstmLayer {
  int input_size = 0;
  int hidden_size = 0;
  Parameter weight;  // 4H x (in + H)
  Parameter bias;    // 4H x 1

  LstmLayer() = default;
  LstmLayer(const std::string& name, int input, int hidden, Rng& rng);
};

struct LstmState {
  Matrix h;  // hidden x batch
  Matrix c;

  static LstmState Zero(int hidden, int batch) {
    return {Matrix::Zero(hidden, batch), Matrix::Zero(hidden, batch)};
  }
};

struct TapeLstmState {
  Tape::Var h = -1;
  Tape::Var c = -1;
};

// Advances `state` by one step of input `x` (in x batch).
void LstmStep(const LstmLayer& layer, const Matrix& x, LstmState& state);

TapeLstmState LstmStep(Tape& tape, LstmLayer& layer, Tape::Var x, TapeLstmState state);

// Affine map y = W x + b.
struct Linear {
  Parameter weight;  // out x in
  Parameter bias;    // out x 1

  Linear() = default;
  Linear(const std::string& name, int in, int out, Rng& rng, double gain = 1.0);
  Matrix Apply(const Matrix& x) const;
  Tape::Var Apply(Tape& tape, Tape::Var x);
};

}  // namespace mbt::nn

#endif  // MBT_NN_LSTM_HPP_
