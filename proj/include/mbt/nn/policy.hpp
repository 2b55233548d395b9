#ifndef MBT_NN_POLICY_HPP_
#define MBT_NN_POLICY_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "mbt/common/random.hpp"
#include "mbt/nn/lstm.hpp"
#include "mbt/nn/tape.hpp"

namespace mbt::nn {

inline constexpr int kPolicyInput = 26;
inline constexpr int kPolicyHidden = 64;
inline constexpr int kActionDim = 10;

// Two stacked LSTM layers followed by a linear head.
struct RecurrentNet {
  LstmLayer lstm1;
  LstmLayer lstm2;
  Linear head;

  struct State {
    LstmState layer1;
    LstmState layer2;
  };
  struct TapeState {
    TapeLstmState layer1;
    TapeLstmState layer2;
  };

  RecurrentNet() = default;
  RecurrentNet(const std::string& name, int input, int hidden, int output, Rng& rng,
               double head_gain);

  int input_size() const { return lstm1.input_size; }
  int hidden_size() const { return lstm1.hidden_size; }
  State ZeroState(int batch) const;
  Matrix Step(const Matrix& x, State& state) const;
  Tape::Var Step(Tape& tape, Tape::Var x, TapeState& state);
  TapeState Bind(Tape& tape, const State& state) const;
  std::vector<Parameter*> Parameters();
};

struct PolicyState {
  RecurrentNet::State actor;
  RecurrentNet::State critic;
};

struct SequenceOutput {
  std::vector<Matrix> means;   // action_dim x batch per step
  std::vector<Matrix> values;  // 1 x batch per step
  PolicyState final_state;
};

struct TapeSequence {
  std::vector<Tape::Var> means;
  std::vector<Tape::Var> values;
  Tape::Var log_std = -1;
};

// Gaussian actor with a state-independent log standard deviation, plus a
// critic with its own recurrent trunk. Both read the same observation.
class PolicyNet {
 public:
  PolicyNet() : PolicyNet(0) {}
  explicit PolicyNet(std::uint64_t seed, int input = kPolicyInput, int hidden = kPolicyHidden,
                     int actions = kActionDim, double log_std_init = -0.5);

  int input_size() const { return actor.input_size(); }
  int action_size() const { return static_cast<int>(log_std.value.rows()); }
  int hidden_size() const { return actor.hidden_size(); }

  PolicyState InitialState(int batch) const;
  // One step for a batch of observations (input x batch).
  void Step(const Matrix& obs, PolicyState& state, Matrix* mean, Matrix* value) const;
  SequenceOutput ForwardSequence(const std::vector<Matrix>& obs,
                                 const PolicyState& initial) const;
  TapeSequence ForwardSequence(Tape& tape, const std::vector<Matrix>& obs,
                               const PolicyState& initial);

  // Fixed order; checkpoints and the optimizer rely on it.
  std::vector<Parameter*> Parameters();
  std::vector<const Parameter*> Parameters() const;
  void ZeroGrad();

  RecurrentNet actor;
  RecurrentNet critic;
  Parameter log_std;  // action_dim x 1
};

// Log density of `action` under N(mean, exp(log_std)^2), summed over rows.
// Returns one entry per column.
Eigen::RowVectorXd GaussianLogProb(const Matrix& mean, const Matrix& log_std,
                                   const Matrix& action);
double GaussianEntropy(const Matrix& log_std);
Matrix SampleGaussian(const Matrix& mean, const Matrix& log_std, Rng& rng);

}  // namespace mbt::nn

#endif  // MBT_NN_POLICY_HPP_
