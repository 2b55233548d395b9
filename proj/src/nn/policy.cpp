#include "mbt/nn/policy.hpp"

#include <cmath>

#include "mbt/common/errors.hpp"

namespace mbt::nn {
namespace {

constexpr double kLog2Pi = 1.8378770664093453;

}  // namespace

RecurrentNet::RecurrentNet(const std::string& name, int input, int hidden, int output,
                           Rng& rng, double head_gain)
    : lstm1(name + ".lstm1", input, hidden, rng),
      lstm2(name + ".lstm2", hidden, hidden, rng),
      head(name + ".head", hidden, output, rng, head_gain) {}

RecurrentNet::State RecurrentNet::ZeroState(int batch) const {
  return {LstmState::Zero(hidden_size(), batch), LstmState::Zero(hidden_size(), batch)};
}

Matrix RecurrentNet::Step(const Matrix& x, State& state) const {
  LstmStep(lstm1, x, state.layer1);
  LstmStep(lstm2, state.layer1.h, state.layer2);
  return head.Apply(state.layer2.h);
}

Tape::Var RecurrentNet::Step(Tape& tape, Tape::Var x, TapeState& state) {
  state.layer1 = LstmStep(tape, lstm1, x, state.layer1);
  state.layer2 = LstmStep(tape, lstm2, state.layer1.h, state.layer2);
  return head.Apply(tape, state.layer2.h);
}

RecurrentNet::TapeState RecurrentNet::Bind(Tape& tape, const State& state) const {
  TapeState out;
  out.layer1 = {tape.Constant(state.layer1.h), tape.Constant(state.layer1.c)};
  out.layer2 = {tape.Constant(state.layer2.h), tape.Constant(state.layer2.c)};
  return out;
}

std::vector<Parameter*> RecurrentNet::Parameters() {
  return {&lstm1.weight, &lstm1.bias, &lstm2.weight, &lstm2.bias, &head.weight, &head.bias};
}

PolicyNet::PolicyNet(std::uint64_t seed, int input, int hidden, int actions,
                     double log_std_init) {
  Rng rng(seed);
  actor = RecurrentNet("actor", input, hidden, actions, rng, 0.01);
  critic = RecurrentNet("critic", input, hidden, 1, rng, 1.0);
  log_std = Parameter("log_std", Matrix::Constant(actions, 1, log_std_init));
}

PolicyState PolicyNet::InitialState(int batch) const {
  return {actor.ZeroState(batch), critic.ZeroState(batch)};
}

void PolicyNet::Step(const Matrix& obs, PolicyState& state, Matrix* mean,
                     Matrix* value) const {
  if (obs.rows() != input_size()) {
    throw ShapeError("policy input has " + std::to_string(obs.rows()) + " rows, expected " +
                     std::to_string(input_size()));
  }
  Matrix m = actor.Step(obs, state.actor);
  Matrix v = critic.Step(obs, state.critic);
  if (mean != nullptr) *mean = std::move(m);
  if (value != nullptr) *value = std::move(v);
}

SequenceOutput PolicyNet::ForwardSequence(const std::vector<Matrix>& obs,
                                          const PolicyState& initial) const {
  SequenceOutput out;
  out.final_state = initial;
  out.means.reserve(obs.size());
  out.values.reserve(obs.size());
  for (const Matrix& x : obs) {
    Matrix mean;
    Matrix value;
    Step(x, out.final_state, &mean, &value);
    out.means.push_back(std::move(mean));
    out.values.push_back(std::move(value));
  }
  return out;
}

TapeSequence PolicyNet::ForwardSequence(Tape& tape, const std::vector<Matrix>& obs,
                                        const PolicyState& initial) {
  TapeSequence out;
  RecurrentNet::TapeState actor_state = actor.Bind(tape, initial.actor);
  RecurrentNet::TapeState critic_state = critic.Bind(tape, initial.critic);
  for (const Matrix& x : obs) {
    if (x.rows() != input_size()) {
      throw ShapeError("policy input has " + std::to_string(x.rows()) + " rows, expected " +
                       std::to_string(input_size()));
    }
    const Tape::Var input = tape.Constant(x);
    out.means.push_back(actor.Step(tape, input, actor_state));
    out.values.push_back(critic.Step(tape, input, critic_state));
  }
  out.log_std = tape.Param(&log_std);
  return out;
}

std::vector<Parameter*> PolicyNet::Parameters() {
  std::vector<Parameter*> out = actor.Parameters();
  for (Parameter* p : critic.Parameters()) out.push_back(p);
  out.push_back(&log_std);
  return out;
}

std::vector<const Parameter*> PolicyNet::Parameters() const {
  std::vector<const Parameter*> out;
  for (Parameter* p : const_cast<PolicyNet*>(this)->Parameters()) out.push_back(p);
  return out;
}

void PolicyNet::ZeroGrad() {
  for (Parameter* p : Parameters()) p->ZeroGrad();
}

Eigen::RowVectorXd GaussianLogProb(const Matrix& mean, const Matrix& log_std,
                                   const Matrix& action) {
  if (mean.rows() != action.rows() || mean.cols() != action.cols() ||
      log_std.rows() != mean.rows()) {
    throw ShapeError("GaussianLogProb: shape mismatch");
  }
  const Eigen::ArrayXd inv_std = (-log_std.col(0).array()).exp();
  const Matrix z = ((action - mean).array().colwise() * inv_std).matrix();
  const double constant = log_std.sum() + 0.5 * kLog2Pi * static_cast<double>(mean.rows());
  return (-0.5 * z.array().square().colwise().sum()).matrix().array() - constant;
}

double GaussianEntropy(const Matrix& log_std) {
  return log_std.sum() + 0.5 * (1.0 + kLog2Pi) * static_cast<double>(log_std.rows());
}

Matrix SampleGaussian(const Matrix& mean, const Matrix& log_std, Rng& rng) {
  Matrix out(mean.rows(), mean.cols());
  for (int c = 0; c < mean.cols(); ++c) {
    for (int r = 0; r < mean.rows(); ++r) {
      out(r, c) = mean(r, c) + std::exp(log_std(r, 0)) * Normal(rng, 0.0, 1.0);
    }
  }
  return out;
}

}  // namespace mbt::nn
