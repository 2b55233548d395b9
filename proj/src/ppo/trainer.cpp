#include "mbt/ppo/trainer.hpp"

#include <chrono>
#include <fstream>

#include "mbt/common/errors.hpp"
#include "mbt/env/termination.hpp"

namespace mbt::ppo {
namespace {

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

nn::AdamConfig OptimizerConfig(const TrainerConfig& c) {
  nn::AdamConfig a;
  a.lr = c.lr;
  a.max_grad_norm = c.max_grad_norm;
  return a;
}

}  // namespace

std::string StageCheckpointName(int stage) { return "stage" + std::to_string(stage) + ".ckpt"; }

Trainer::Trainer(TrainerConfig config, std::filesystem::path run_dir)
    : config_(std::move(config)), run_dir_(std::move(run_dir)) {
  if (config_.first_stage < 1 || config_.last_stage > env::kNumStages ||
      config_.first_stage > config_.last_stage) {
    throw ConfigError("stage range must lie within 1.." + std::to_string(env::kNumStages));
  }
  if (config_.buffer_size < 1 || config_.epochs < 1 || config_.batch_episodes < 1) {
    throw ConfigError("buffer size, epochs and batch size must be positive");
  }
  stage_ = config_.first_stage;
  bundle_ = std::make_unique<PolicyBundle>();
  bundle_->net = nn::PolicyNet(MixSeed(config_.seed, 0xA11CE), env::kObsDim, nn::kPolicyHidden,
                               nn::kActionDim, config_.log_std_init);
  bundle_->normalize = config_.normalize_observations;
  adam_ = std::make_unique<nn::Adam>(bundle_->net.Parameters(), OptimizerConfig(config_));
  if (!run_dir_.empty()) std::filesystem::create_directories(run_dir_);
}

std::unique_ptr<Trainer> Trainer::Resume(const std::filesystem::path& checkpoint,
                                         TrainerConfig config, std::filesystem::path run_dir) {
  const nn::Checkpoint ckpt = nn::LoadCheckpoint(checkpoint);
  if (ckpt.meta.value("kind", "") != "trainer") {
    throw ConfigError(checkpoint.string() + " is not a trainer checkpoint");
  }
  config.seed = ckpt.meta.value("seed", config.seed);
  auto trainer = std::make_unique<Trainer>(std::move(config), std::move(run_dir));
  RestoreBundle(ckpt, *trainer->bundle_);
  trainer->adam_ = std::make_unique<nn::Adam>(trainer->bundle_->net.Parameters(),
                                              OptimizerConfig(trainer->config_));
  nn::RestoreOptimizer(ckpt, *trainer->adam_);
  trainer->stage_ = ckpt.meta.value("stage", trainer->config_.first_stage);
  trainer->stage_steps_ = ckpt.meta.value("stage_steps", 0LL);
  trainer->total_steps_ = ckpt.meta.value("total_steps", 0LL);
  trainer->iteration_ = ckpt.meta.value("iteration", 0LL);
  return trainer;
}

void Trainer::Save(const std::filesystem::path& path) const {
  nn::Checkpoint ckpt;
  StoreBundle(ckpt, *bundle_);
  nn::StoreOptimizer(ckpt, *adam_);
  ckpt.meta["kind"] = "trainer";
  ckpt.meta["stage"] = stage_;
  ckpt.meta["stage_steps"] = stage_steps_;
  ckpt.meta["total_steps"] = total_steps_;
  ckpt.meta["iteration"] = iteration_;
  // Every random stream is derived from (seed, iteration), so these two
  // values are the complete generator state.
  ckpt.meta["seed"] = config_.seed;
  nn::SaveCheckpoint(path, ckpt);
}

IterationStats Trainer::Iterate() {
  if (Finished()) throw UsageError("training already finished");
  IterationStats stats;
  stats.iteration = iteration_;
  stats.stage = stage_;
  const env::CurriculumStage stage =
      env::MakeStage(stage_, config_.perturbation_bound, config_.torsion_bound);

  auto t0 = std::chrono::steady_clock::now();
  CollectSettings settings;
  settings.min_transitions = config_.buffer_size;
  settings.num_envs = config_.envs_per_worker;
  settings.workers = config_.workers;
  RolloutBatch batch = CollectRollouts(*bundle_, stage, config_, settings,
                                       MixSeed(config_.seed, iteration_, 1));
  stats.collect_seconds = Seconds(t0);

  stats.transitions = batch.transitions();
  stats.episodes = static_cast<int>(batch.episodes.size());
  stats.discarded = batch.discarded_episodes;
  int failures = 0;
  for (const EpisodeRecord& e : batch.episodes) {
    stats.mean_length += e.length;
    stats.mean_return += e.mean_return;
    if (env::IsFailure(e.termination)) ++failures;
    for (std::size_t k = 0; k < e.term_means.size(); ++k) stats.term_means[k] += e.term_means[k];
    stats.robot_counts.push_back(e.num_robots);
  }
  if (stats.episodes > 0) {
    stats.mean_length /= stats.episodes;
    stats.mean_return /= stats.episodes;
    stats.failure_rate = 100.0 * failures / stats.episodes;
    for (double& v : stats.term_means) v /= stats.episodes;
  }

  t0 = std::chrono::steady_clock::now();
  try {
    stats.update = PpoUpdate(bundle_->net, *adam_, batch.trajectories, config_,
                             MixSeed(config_.seed, iteration_, 2));
  } catch (const TrainingFault& e) {
    if (!run_dir_.empty()) {
      std::ofstream dump(run_dir_ / ("fault_iteration" + std::to_string(iteration_) + ".txt"));
      dump << e.what() << "\n";
      for (const Trajectory& t : batch.trajectories) {
        dump << t.episode << "\t" << t.robot << "\t" << t.length() << "\t"
             << (t.observations.allFinite() ? "finite" : "non-finite") << "\n";
      }
    }
    throw;
  }
  stats.update_seconds = Seconds(t0);
  if (bundle_->normalize) bundle_->normalizer.Update(batch.raw_observations);

  ++iteration_;
  stage_steps_ += stats.transitions;
  total_steps_ += stats.transitions;
  stats.stage_steps = stage_steps_;
  stats.total_steps = total_steps_;
  const bool budget_spent = stage_steps_ >= config_.stage_budgets[stage_ - 1];
  const bool long_enough = config_.early_advance && stats.episodes > 0 &&
                           stats.mean_length >= config_.early_advance_length;
  if (budget_spent || long_enough) {
    if (!run_dir_.empty()) Save(run_dir_ / StageCheckpointName(stage_));
    ++stage_;
    stage_steps_ = 0;
    stats.advanced = true;
  }
  if (!run_dir_.empty()) {
    AppendMetrics(stats);
    Save(run_dir_ / "latest.ckpt");
  }
  return stats;
}

void Trainer::Run(const std::function<void(const IterationStats&)>& on_iteration,
                  long long max_iterations) {
  long long done = 0;
  while (!Finished() && (max_iterations < 0 || done < max_iterations)) {
    const IterationStats stats = Iterate();
    ++done;
    if (on_iteration) on_iteration(stats);
  }
  if (Finished() && !run_dir_.empty()) Save(run_dir_ / "final.ckpt");
}

void Trainer::AppendMetrics(const IterationStats& s) const {
  const std::filesystem::path path = run_dir_ / "metrics.tsv";
  const bool fresh = !std::filesystem::exists(path);
  std::ofstream out(path, std::ios::app);
  if (!out) throw ConfigError("cannot append to " + path.string());
  if (fresh) {
    out << "iteration\tstage\tstage_steps\ttotal_steps\ttransitions\tepisodes\tdiscarded"
           "\tmean_length\tmean_return\tfailure_rate\tpolicy_loss\tvalue_loss\tentropy"
           "\tapprox_kl\tclip_fraction\tgrad_norm\tcollect_s\tupdate_s";
    for (const std::string& name : env::RewardBreakdown::TermNames()) out << "\t" << name;
    out << "\n";
  }
  out << s.iteration << "\t" << s.stage << "\t" << s.stage_steps << "\t" << s.total_steps
      << "\t" << s.transitions << "\t" << s.episodes << "\t" << s.discarded << "\t"
      << s.mean_length << "\t" << s.mean_return << "\t" << s.failure_rate << "\t"
      << s.update.policy_loss << "\t" << s.update.value_loss << "\t" << s.update.entropy
      << "\t" << s.update.approx_kl << "\t" << s.update.clip_fraction << "\t"
      << s.update.grad_norm << "\t" << s.collect_seconds << "\t" << s.update_seconds;
  for (double v : s.term_means) out << "\t" << v;
  out << "\n";
}

}  // namespace mbt::ppo
