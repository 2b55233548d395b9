#include "mbt/ppo/gae.hpp"

#include <string>

#include "mbt/common/errors.hpp"

namespace mbt::ppo {

GaeResult ComputeGae(std::span<const double> rewards, std::span<const double> values,
                     std::span<const std::uint8_t> dones, std::span<const double> bootstrap,
                     double gamma, double lambda) {
  const std::size_t n = rewards.size();
  if (values.size() != n || dones.size() != n || bootstrap.size() != n) {
    throw ShapeError("ComputeGae: rewards " + std::to_string(n) + ", values " +
                     std::to_string(values.size()) + ", dones " +
                     std::to_string(dones.size()) + ", bootstrap " +
                     std::to_string(bootstrap.size()));
  }
  GaeResult out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);
  double running = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    const bool last = dones[k] != 0 || k + 1 == n;
    const double next_value = last ? bootstrap[k] : values[k + 1];
    const double delta = rewards[k] + gamma * next_value - values[k];
    running = delta + (last ? 0.0 : gamma * lambda * running);
    out.advantages[k] = running;
    out.returns[k] = running + values[k];
  }
  return out;
}

GaeResult ComputeGae(std::span<const double> rewards, std::span<const double> values,
                     double bootstrap_value, double gamma, double lambda) {
  std::vector<std::uint8_t> dones(rewards.size(), 0);
  std::vector<double> bootstrap(rewards.size(), 0.0);
  if (!rewards.empty()) {
    dones.back() = 1;
    bootstrap.back() = bootstrap_value;
  }
  return ComputeGae(rewards, values, dones, bootstrap, gamma, lambda);
}

}  // namespace mbt::ppo
