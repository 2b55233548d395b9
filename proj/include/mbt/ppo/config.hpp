#ifndef MBT_PPO_CONFIG_HPP_
#define MBT_PPO_CONFIG_HPP_

#include <array>
#include <cstdint>
#include <optional>

#include "mbt/env/env.hpp"
#include "mbt/sim/scene.hpp"

namespace mbt::ppo {

struct TrainerConfig {
  double gamma = 0.95;
  double gae_lambda = 1.0;
  double clip = 0.2;
  int epochs = 5;
  int batch_episodes = 32;  // robot trajectories per minibatch
  double value_coef = 0.5;
  double entropy_coef = 0.01;
  double lr = 3e-4;
  double max_grad_norm = 0.05;
  double log_std_init = -0.5;
  int buffer_size = 60000;  // transitions collected per update
  bool normalize_advantages = true;
  bool normalize_observations = true;

  // Env steps (summed over robots) spent in each curriculum stage.
  std::array<long long, 4> stage_budgets{2'000'000, 2'000'000, 4'000'000, 8'000'000};
  bool early_advance = true;
  double early_advance_length = 475.0;  // mean episode length, policy steps
  int first_stage = 1;
  int last_stage = 4;
  double perturbation_bound = 50.0;
  double torsion_bound = 5.0;

  int envs_per_worker = 8;
  int workers = 1;
  std::uint64_t seed = 0;
  env::EnvOptions env;
  // Specialized mode: every episode uses this configuration.
  std::optional<sim::AttachmentConfig> fixed_config;
};

}  // namespace mbt::ppo

#endif  // MBT_PPO_CONFIG_HPP_
