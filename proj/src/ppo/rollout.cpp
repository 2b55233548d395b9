#include "mbt/ppo/rollout.hpp"

#include <thread>

#include "mbt/common/errors.hpp"
#include "mbt/ppo/gae.hpp"

namespace mbt::ppo {
namespace {

constexpr int kNumTerms = env::kNumLocalTerms + env::kNumGlobalTerms;

struct OpenTrajectory {
  std::vector<double> observations;
  std::vector<double> actions;
  std::vector<double> log_probs;
  std::vector<double> values;
  std::vector<double> rewards;
};

struct Slot {
  env::Env env;
  nn::PolicyState state;
  std::vector<env::Observation> observations;
  std::vector<OpenTrajectory> open;
  std::array<double, kNumTerms> term_sums{};
  std::uint64_t episode = 0;
  bool active = false;

  int Steps() const { return open.empty() ? 0 : static_cast<int>(open[0].rewards.size()); }
};

std::array<double, kNumTerms> Terms(const env::RewardBreakdown& r) {
  std::array<double, kNumTerms> out{};
  const auto local = r.LocalTerms();
  const auto global = r.GlobalTerms();
  std::copy(local.begin(), local.end(), out.begin());
  std::copy(global.begin(), global.end(), out.begin() + env::kNumLocalTerms);
  return out;
}

Trajectory Close(OpenTrajectory& open, std::uint64_t episode, int robot, int num_robots) {
  Trajectory t;
  t.episode = episode;
  t.robot = robot;
  t.num_robots = num_robots;
  const Eigen::Index len = static_cast<Eigen::Index>(open.rewards.size());
  t.observations = Eigen::Map<const nn::Matrix>(open.observations.data(), env::kObsDim, len);
  t.actions = Eigen::Map<const nn::Matrix>(open.actions.data(), nn::kActionDim, len);
  t.log_probs = std::move(open.log_probs);
  t.values = std::move(open.values);
  t.rewards = std::move(open.rewards);
  return t;
}

RolloutBatch CollectWorker(const PolicyBundle& policy, const env::CurriculumStage& stage,
                           const TrainerConfig& config, const CollectSettings& settings,
                           long long target, std::uint64_t seed, std::uint64_t worker) {
  const int num_envs = settings.num_envs;
  Rng episode_rng(MixSeed(seed, worker, 0));
  Rng action_rng(MixSeed(seed, worker, 1));
  RolloutBatch batch;
  std::vector<double> raw_obs;
  long long stored = 0;
  int consecutive_faults = 0;
  std::uint64_t next_episode = 0;
  std::vector<Slot> slots(num_envs);
  for (Slot& s : slots) s.env = env::Env(config.env);

  auto in_flight = [&] {
    long long n = 0;
    for (const Slot& s : slots) {
      if (s.active) n += static_cast<long long>(s.Steps()) * s.env.NumRobots();
    }
    return n;
  };
  auto start = [&](Slot& s) {
    s.active = false;
    if (stored + in_flight() >= target) return;
    const env::EpisodeSpec spec =
        env::SampleEpisode(stage, episode_rng, config.env, config.fixed_config);
    s.observations = s.env.Reset(spec);
    const int n = s.env.NumRobots();
    s.state = policy.net.InitialState(n);
    s.open.assign(n, OpenTrajectory{});
    s.term_sums.fill(0.0);
    s.episode = (worker << 32) | next_episode++;
    s.active = true;
  };
  auto discard = [&](Slot& s, const std::string& what) {
    batch.faults.push_back(what);
    ++batch.discarded_episodes;
    if (++consecutive_faults >= settings.max_consecutive_faults) {
      throw TrainingFault(std::to_string(consecutive_faults) +
                          " consecutive episodes faulted; last: " + what);
    }
    start(s);
  };
  for (Slot& s : slots) start(s);

  bool any = true;
  while (any) {
    any = false;
    for (Slot& s : slots) {
      if (!s.active) continue;
      any = true;
      const int n = s.env.NumRobots();
      const nn::Matrix raw = RawObservationMatrix(s.observations);
      raw_obs.insert(raw_obs.end(), raw.data(), raw.data() + raw.size());
      const nn::Matrix input = policy.normalize ? policy.normalizer.Normalize(raw) : raw;
      nn::Matrix mean;
      nn::Matrix value;
      policy.net.Step(input, s.state, &mean, &value);
      const nn::Matrix sampled = nn::SampleGaussian(mean, policy.net.log_std.value, action_rng);
      const Eigen::RowVectorXd logp =
          nn::GaussianLogProb(mean, policy.net.log_std.value, sampled);
      for (int r = 0; r < n; ++r) {
        OpenTrajectory& o = s.open[r];
        o.observations.insert(o.observations.end(), input.col(r).data(),
                              input.col(r).data() + env::kObsDim);
        o.actions.insert(o.actions.end(), sampled.col(r).data(),
                         sampled.col(r).data() + nn::kActionDim);
        o.log_probs.push_back(logp(r));
        o.values.push_back(value(0, r));
      }

      env::StepResult result;
      try {
        result = s.env.Step(ToActions(sampled));
      } catch (const NumericalFault& e) {
        discard(s, e.what());
        continue;
      } catch (const SolverError& e) {
        discard(s, e.what());
        continue;
      }
      for (int r = 0; r < n; ++r) {
        s.open[r].rewards.push_back(result.rewards[r].total);
        const auto terms = Terms(result.rewards[r]);
        for (int k = 0; k < kNumTerms; ++k) s.term_sums[k] += terms[k];
      }
      if (!result.done) {
        s.observations = std::move(result.observations);
        continue;
      }

      const bool failed = env::IsFailure(result.termination);
      nn::Matrix bootstrap = nn::Matrix::Zero(1, n);
      if (!failed) {
        nn::PolicyState after = s.state;
        policy.net.Step(PolicyInput(policy, result.observations), after, nullptr, &bootstrap);
      }
      EpisodeRecord record;
      record.episode = s.episode;
      record.num_robots = n;
      record.length = s.Steps();
      record.termination = result.termination;
      double total = 0.0;
      for (int r = 0; r < n; ++r) {
        Trajectory t = Close(s.open[r], s.episode, r, n);
        t.terminated = failed;
        t.bootstrap_value = failed ? 0.0 : bootstrap(0, r);
        for (double v : t.rewards) total += v;
        stored += t.length();
        batch.trajectories.push_back(std::move(t));
      }
      record.mean_return = total / n;
      for (int k = 0; k < kNumTerms; ++k) {
        record.term_means[k] = s.term_sums[k] / (static_cast<double>(n) * record.length);
      }
      batch.episodes.push_back(record);
      consecutive_faults = 0;
      start(s);
    }
  }
  batch.raw_observations = Eigen::Map<const nn::Matrix>(
      raw_obs.data(), env::kObsDim, static_cast<Eigen::Index>(raw_obs.size() / env::kObsDim));
  return batch;
}

}  // namespace

long long RolloutBatch::transitions() const {
  long long n = 0;
  for (const Trajectory& t : trajectories) n += t.length();
  return n;
}

RolloutBatch CollectRollouts(const PolicyBundle& policy, const env::CurriculumStage& stage,
                             const TrainerConfig& config, const CollectSettings& settings,
                             std::uint64_t seed) {
  if (settings.num_envs < 1 || settings.workers < 1) {
    throw ConfigError("rollout collection needs at least one env and one worker");
  }
  const long long per_worker =
      (static_cast<long long>(settings.min_transitions) + settings.workers - 1) /
      settings.workers;
  std::vector<RolloutBatch> parts(settings.workers);
  if (settings.workers == 1) {
    parts[0] = CollectWorker(policy, stage, config, settings, per_worker, seed, 0);
  } else {
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(settings.workers);
    for (int w = 0; w < settings.workers; ++w) {
      threads.emplace_back([&, w] {
        try {
          parts[w] = CollectWorker(policy, stage, config, settings, per_worker, seed,
                                   static_cast<std::uint64_t>(w));
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (std::thread& t : threads) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  RolloutBatch out = std::move(parts[0]);
  for (std::size_t w = 1; w < parts.size(); ++w) {
    RolloutBatch& p = parts[w];
    std::move(p.trajectories.begin(), p.trajectories.end(), std::back_inserter(out.trajectories));
    out.episodes.insert(out.episodes.end(), p.episodes.begin(), p.episodes.end());
    out.faults.insert(out.faults.end(), p.faults.begin(), p.faults.end());
    out.discarded_episodes += p.discarded_episodes;
    nn::Matrix joined(env::kObsDim, out.raw_observations.cols() + p.raw_observations.cols());
    joined << out.raw_observations, p.raw_observations;
    out.raw_observations = std::move(joined);
  }
  return out;
}

void ComputeAdvantages(std::vector<Trajectory>& trajectories, double gamma, double lambda) {
  for (Trajectory& t : trajectories) {
    GaeResult gae = ComputeGae(t.rewards, t.values, t.bootstrap_value, gamma, lambda);
    t.advantages = std::move(gae.advantages);
    t.returns = std::move(gae.returns);
  }
}

}  // namespace mbt::ppo
