#ifndef MBT_PPO_RUNNER_HPP_
#define MBT_PPO_RUNNER_HPP_

#include <filesystem>
#include <vector>

#include "mbt/env/observation.hpp"
#include "mbt/nn/checkpoint.hpp"
#include "mbt/nn/normalizer.hpp"
#include "mbt/nn/policy.hpp"
#include "mbt/sim/legs.hpp"

namespace mbt::ppo {

// Frozen policy as deployed: network plus observation statistics.
struct PolicyBundle {
  nn::PolicyNet net;
  nn::RunningNormalizer normalizer{env::kObsDim};
  bool normalize = true;
};

// Throws ConfigError when the file is unreadable or its network does not
// take the 26-entry observation.
PolicyBundle LoadPolicyBundle(const std::filesystem::path& path);
void StoreBundle(nn::Checkpoint& ckpt, const PolicyBundle& bundle);
void RestoreBundle(const nn::Checkpoint& ckpt, PolicyBundle& bundle);

// Observations as columns, normalized with the bundle statistics.
nn::Matrix PolicyInput(const PolicyBundle& bundle, const std::vector<env::Observation>& obs);
nn::Matrix RawObservationMatrix(const std::vector<env::Observation>& obs);

// Raw network actions (one column per robot) clipped to [-1, 1].
std::vector<sim::ActionCommand> ToActions(const nn::Matrix& raw);

// Runs the shared policy for a team. Each robot is one column with its own
// recurrent state; columns never mix.
class PolicyRunner {
 public:
  PolicyRunner(const PolicyBundle& bundle, int num_robots);

  void Reset(int num_robots);
  // Means (action x robots) for the current observations; advances state.
  nn::Matrix Step(const std::vector<env::Observation>& obs, nn::Matrix* values = nullptr);
  std::vector<sim::ActionCommand> Act(const std::vector<env::Observation>& obs);
  const nn::PolicyState& state() const { return state_; }

 private:
  const PolicyBundle* bundle_;
  nn::PolicyState state_;
};

}  // namespace mbt::ppo

#endif  // MBT_PPO_RUNNER_HPP_
