#include "mbt/ppo/runner.hpp"

#include <algorithm>

#include "mbt/common/errors.hpp"

namespace mbt::ppo {

PolicyBundle LoadPolicyBundle(const std::filesystem::path& path) {
  const nn::Checkpoint ckpt = nn::LoadCheckpoint(path);
  PolicyBundle bundle;
  RestoreBundle(ckpt, bundle);
  return bundle;
}

void StoreBundle(nn::Checkpoint& ckpt, const PolicyBundle& bundle) {
  nn::StorePolicy(ckpt, bundle.net);
  nn::StoreNormalizer(ckpt, bundle.normalizer);
  ckpt.meta["normalize_observations"] = bundle.normalize;
}

void RestoreBundle(const nn::Checkpoint& ckpt, PolicyBundle& bundle) {
  const auto& policy = ckpt.meta.value("policy", nlohmann::json::object());
  const int input = policy.value("input", -1);
  const int hidden = policy.value("hidden", -1);
  const int actions = policy.value("actions", -1);
  if (input != env::kObsDim || actions != nn::kActionDim) {
    throw ConfigError("checkpoint policy takes " + std::to_string(input) +
                      " observations and emits " + std::to_string(actions) +
                      " actions; expected " + std::to_string(env::kObsDim) + " and " +
                      std::to_string(nn::kActionDim));
  }
  if (hidden <= 0) throw ConfigError("checkpoint has no valid hidden size");
  bundle.net = nn::PolicyNet(0, input, hidden, actions);
  nn::RestorePolicy(ckpt, bundle.net);
  bundle.normalizer = nn::RunningNormalizer(env::kObsDim);
  nn::RestoreNormalizer(ckpt, bundle.normalizer);
  bundle.normalize = ckpt.meta.value("normalize_observations", true);
}

nn::Matrix RawObservationMatrix(const std::vector<env::Observation>& obs) {
  nn::Matrix out(env::kObsDim, static_cast<Eigen::Index>(obs.size()));
  for (std::size_t c = 0; c < obs.size(); ++c) {
    for (int r = 0; r < env::kObsDim; ++r) out(r, static_cast<Eigen::Index>(c)) = obs[c][r];
  }
  return out;
}

nn::Matrix PolicyInput(const PolicyBundle& bundle, const std::vector<env::Observation>& obs) {
  nn::Matrix raw = RawObservationMatrix(obs);
  if (!bundle.normalize) return raw;
  return bundle.normalizer.Normalize(raw);
}

std::vector<sim::ActionCommand> ToActions(const nn::Matrix& raw) {
  if (raw.rows() != sim::kActionDim) throw ShapeError("ToActions: wrong action size");
  std::vector<sim::ActionCommand> out(raw.cols());
  for (Eigen::Index c = 0; c < raw.cols(); ++c) {
    for (int r = 0; r < sim::kActionDim; ++r) out[c][r] = std::clamp(raw(r, c), -1.0, 1.0);
  }
  return out;
}

PolicyRunner::PolicyRunner(const PolicyBundle& bundle, int num_robots) : bundle_(&bundle) {
  Reset(num_robots);
}

void PolicyRunner::Reset(int num_robots) { state_ = bundle_->net.InitialState(num_robots); }

nn::Matrix PolicyRunner::Step(const std::vector<env::Observation>& obs, nn::Matrix* values) {
  if (static_cast<Eigen::Index>(obs.size()) != state_.actor.layer1.h.cols()) {
    throw ShapeError("PolicyRunner: observation count does not match the team size");
  }
  nn::Matrix mean;
  bundle_->net.Step(PolicyInput(*bundle_, obs), state_, &mean, values);
  return mean;
}

std::vector<sim::ActionCommand> PolicyRunner::Act(const std::vector<env::Observation>& obs) {
  return ToActions(Step(obs));
}

}  // namespace mbt::ppo
