#ifndef MBT_PPO_GAE_HPP_
#define MBT_PPO_GAE_HPP_

#include <cstdint>
#include <span>
#include <vector>

namespace mbt::ppo {

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// Generalized advantage estimation over concatenated episodes.
// dones[t] != 0 marks the last step of an episode; the value of the state
// after such a step is bootstrap[t] (0 on termination, a critic estimate on
// truncation). Otherwise the next value is values[t + 1]. The final step is
// always treated as an episode end. Throws ShapeError on length mismatch.
GaeResult ComputeGae(std::span<const double> rewards, std::span<const double> values,
                     std::span<const std::uint8_t> dones, std::span<const double> bootstrap,
                     double gamma, double lambda);

// Single episode convenience form.
GaeResult ComputeGae(std::span<const double> rewards, std::span<const double> values,
                     double bootstrap_value, double gamma, double lambda);

}  // namespace mbt::ppo

#endif  // MBT_PPO_GAE_HPP_
