#ifndef MBT_PPO_TRAINER_HPP_
#define MBT_PPO_TRAINER_HPP_

#include <array>
#include <filesystem>
#include <functional>
#include <memory>

#include <json.hpp>

#include "mbt/nn/adam.hpp"
#include "mbt/ppo/config.hpp"
#include "mbt/ppo/rollout.hpp"
#include "mbt/ppo/runner.hpp"
#include "mbt/ppo/update.hpp"

namespace mbt::ppo {

struct IterationStats {
  long long iteration = 0;
  int stage = 1;
  long long stage_steps = 0;  // after this iteration
  long long total_steps = 0;
  long long transitions = 0;
  int episodes = 0;
  int discarded = 0;
  double mean_length = 0.0;
  double mean_return = 0.0;
  double failure_rate = 0.0;  // percent of episodes ending in failure
  std::array<double, env::kNumLocalTerms + env::kNumGlobalTerms> term_means{};
  std::vector<int> robot_counts;  // team size of every collected episode
  UpdateStats update;
  double collect_seconds = 0.0;
  double update_seconds = 0.0;
  bool advanced = false;
};

// Curriculum driver: collect, update, advance stage when its budget is spent
// (or early, once episodes are long enough). Writes metrics.tsv and
// checkpoints under the run directory when one is given.
class Trainer {
 public:
  Trainer(TrainerConfig config, std::filesystem::path run_dir = {});

  // Continues a run from a checkpoint written by Save.
  static std::unique_ptr<Trainer> Resume(const std::filesystem::path& checkpoint,
                                         TrainerConfig config,
                                         std::filesystem::path run_dir = {});

  IterationStats Iterate();
  bool Finished() const { return stage_ > config_.last_stage; }
  // Iterates until finished or `max_iterations` (< 0: no limit).
  void Run(const std::function<void(const IterationStats&)>& on_iteration = {},
           long long max_iterations = -1);

  void Save(const std::filesystem::path& path) const;

  int stage() const { return stage_; }
  long long iteration() const { return iteration_; }
  long long total_steps() const { return total_steps_; }
  long long stage_steps() const { return stage_steps_; }
  const PolicyBundle& bundle() const { return *bundle_; }
  PolicyBundle& mutable_bundle() { return *bundle_; }
  const TrainerConfig& config() const { return config_; }

 private:
  void AppendMetrics(const IterationStats& stats) const;

  TrainerConfig config_;
  std::filesystem::path run_dir_;
  std::unique_ptr<PolicyBundle> bundle_;  // stable address for the optimizer
  std::unique_ptr<nn::Adam> adam_;
  int stage_ = 1;
  long long stage_steps_ = 0;
  long long total_steps_ = 0;
  long long iteration_ = 0;
};

std::string StageCheckpointName(int stage);

}  // namespace mbt::ppo

#endif  // MBT_PPO_TRAINER_HPP_
