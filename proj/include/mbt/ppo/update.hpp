#ifndef MBT_PPO_UPDATE_HPP_
#define MBT_PPO_UPDATE_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "mbt/nn/adam.hpp"
#include "mbt/nn/policy.hpp"
#include "mbt/nn/tape.hpp"
#include "mbt/ppo/config.hpp"
#include "mbt/ppo/rollout.hpp"

namespace mbt::ppo {

struct MinibatchLoss {
  nn::Tape::Var loss = -1;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
  double ratio_min = 1.0;
  double ratio_max = 1.0;
  int transitions = 0;
};

// Clipped surrogate + value_coef * squared value error - entropy_coef *
// entropy, averaged over the real (unpadded) transitions of the selected
// trajectories. Sequences are replayed from zero recurrent state; shorter
// ones are padded and masked.
MinibatchLoss BuildMinibatchLoss(nn::Tape& tape, nn::PolicyNet& net,
                                 const std::vector<Trajectory>& trajectories,
                                 std::span<const int> indices, const TrainerConfig& config);

struct UpdateStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
  double ratio_min = 1.0;
  double ratio_max = 1.0;
  double grad_norm = 0.0;  // mean pre-clip norm
  double first_ratio_deviation = 0.0;  // max |ratio - 1| on the first minibatch
  std::vector<double> epoch_value_loss;
  int minibatches = 0;
};

// Computes advantages (normalized in place when configured), then runs the
// configured epochs of minibatch updates. On a non-finite loss the
// parameters are restored to their values before the update and
// TrainingFault is thrown.
UpdateStats PpoUpdate(nn::PolicyNet& net, nn::Adam& adam, std::vector<Trajectory>& trajectories,
                      const TrainerConfig& config, std::uint64_t seed);

}  // namespace mbt::ppo

#endif  // MBT_PPO_UPDATE_HPP_
