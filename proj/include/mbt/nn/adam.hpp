#ifndef MBT_NN_ADAM_HPP_
#define MBT_NN_ADAM_HPP_

#include <vector>

#include "mbt/nn/tape.hpp"

namespace mbt::nn {

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double max_grad_norm = 0.05;  // <= 0 disables clipping
};

// Scales all gradients together so their joint L2 norm is at most
// `max_norm`. Returns the norm before scaling.
double ClipGlobalNorm(const std::vector<Parameter*>& params, double max_norm);

class Adam {
 public:
  Adam(std::vector<Parameter*> params, AdamConfig config = {});

  // Clips, then applies one bias-corrected update from the accumulated
  // gradients. Throws TrainingFault naming the first non-finite gradient.
  // Returns the pre-clip gradient norm.
  double Step();

  const AdamConfig& config() const { return config_; }
  void set_lr(double lr) { config_.lr = lr; }
  long long steps() const { return steps_; }
  void set_steps(long long steps) { steps_ = steps; }
  std::vector<Matrix>& first_moments() { return m_; }
  std::vector<Matrix>& second_moments() { return v_; }
  const std::vector<Matrix>& first_moments() const { return m_; }
  const std::vector<Matrix>& second_moments() const { return v_; }
  const std::vector<Parameter*>& params() const { return params_; }

 private:
  std::vector<Parameter*> params_;
  AdamConfig config_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  long long steps_ = 0;
};

}  // namespace mbt::nn

#endif  // MBT_NN_ADAM_HPP_
