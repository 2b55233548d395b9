#include "mbt/ppo/update.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mbt/common/errors.hpp"

namespace mbt::ppo {
namespace {

constexpr double kLog2Pi = 1.8378770664093453;

void NormalizeAdvantages(std::vector<Trajectory>& trajectories) {
  double sum = 0.0;
  double sq = 0.0;
  long long n = 0;
  for (const Trajectory& t : trajectories) {
    for (double a : t.advantages) {
      sum += a;
      sq += a * a;
      ++n;
    }
  }
  if (n < 2) return;
  const double mean = sum / static_cast<double>(n);
  const double var = std::max(0.0, sq / static_cast<double>(n) - mean * mean);
  const double inv = 1.0 / (std::sqrt(var) + 1e-8);
  for (Trajectory& t : trajectories) {
    for (double& a : t.advantages) a = (a - mean) * inv;
  }
}

}  // namespace

MinibatchLoss BuildMinibatchLoss(nn::Tape& tape, nn::PolicyNet& net,
                                 const std::vector<Trajectory>& trajectories,
                                 std::span<const int> indices, const TrainerConfig& config) {
  if (indices.empty()) throw ShapeError("empty minibatch");
  const int batch = static_cast<int>(indices.size());
  int horizon = 0;
  for (int i : indices) {
    const Trajectory& t = trajectories.at(i);
    if (static_cast<int>(t.advantages.size()) != t.length() ||
        static_cast<int>(t.returns.size()) != t.length()) {
      throw UsageError("trajectory advantages not computed");
    }
    horizon = std::max(horizon, t.length());
  }
  const int input = net.input_size();
  const int actions = net.action_size();
  std::vector<nn::Matrix> obs(horizon, nn::Matrix::Zero(input, batch));
  const Eigen::Index cols = static_cast<Eigen::Index>(horizon) * batch;
  nn::Matrix action_all = nn::Matrix::Zero(actions, cols);
  nn::Matrix adv = nn::Matrix::Zero(1, cols);
  nn::Matrix ret = nn::Matrix::Zero(1, cols);
  nn::Matrix old_logp = nn::Matrix::Zero(1, cols);
  nn::Matrix mask = nn::Matrix::Zero(1, cols);
  int count = 0;
  for (int b = 0; b < batch; ++b) {
    const Trajectory& t = trajectories[indices[b]];
    if (t.observations.rows() != input || t.actions.rows() != actions) {
      throw ShapeError("trajectory does not match the network dimensions");
    }
    for (int s = 0; s < t.length(); ++s) {
      const Eigen::Index c = static_cast<Eigen::Index>(s) * batch + b;
      obs[s].col(b) = t.observations.col(s);
      action_all.col(c) = t.actions.col(s);
      adv(0, c) = t.advantages[s];
      ret(0, c) = t.returns[s];
      old_logp(0, c) = t.log_probs[s];
      mask(0, c) = 1.0;
      ++count;
    }
  }

  const nn::TapeSequence seq = net.ForwardSequence(tape, obs, net.InitialState(batch));
  const auto means = tape.ConcatCols(seq.means);
  const auto values = tape.ConcatCols(seq.values);
  const auto log_std_sum = tape.Sum(seq.log_std);
  const auto inv_std =
      tape.BroadcastCols(tape.Exp(tape.Scale(seq.log_std, -1.0)), static_cast<int>(cols));
  const auto z = tape.Mul(tape.Sub(tape.Constant(action_all), means), inv_std);
  const auto logp = tape.AddScalar(
      tape.Sub(tape.Scale(tape.SumRows(tape.Square(z)), -0.5),
               tape.BroadcastCols(log_std_sum, static_cast<int>(cols))),
      -0.5 * kLog2Pi * actions);
  // Padded columns get ratio exactly 1; the mask removes them anyway.
  const nn::Matrix& logp_value = tape.value(logp);
  for (Eigen::Index c = 0; c < cols; ++c) {
    if (mask(0, c) == 0.0) old_logp(0, c) = logp_value(0, c);
  }
  const auto ratio = tape.Exp(tape.Sub(logp, tape.Constant(old_logp)));
  const auto adv_var = tape.Constant(adv);
  const auto surr = tape.Min(tape.Mul(ratio, adv_var),
                             tape.Mul(tape.Clamp(ratio, 1.0 - config.clip, 1.0 + config.clip),
                                      adv_var));
  const auto mask_var = tape.Constant(mask);
  const double inv_n = 1.0 / static_cast<double>(count);
  const auto policy_loss = tape.Scale(tape.Sum(tape.Mul(surr, mask_var)), -inv_n);
  const auto value_loss = tape.Scale(
      tape.Sum(tape.Mul(tape.Square(tape.Sub(values, tape.Constant(ret))), mask_var)), inv_n);
  const auto entropy = tape.AddScalar(log_std_sum, 0.5 * (1.0 + kLog2Pi) * actions);

  MinibatchLoss out;
  out.loss = tape.Sub(tape.Add(policy_loss, tape.Scale(value_loss, config.value_coef)),
                      tape.Scale(entropy, config.entropy_coef));
  out.policy_loss = tape.scalar(policy_loss);
  out.value_loss = tape.scalar(value_loss);
  out.entropy = tape.scalar(entropy);
  out.transitions = count;
  const nn::Matrix& r = tape.value(ratio);
  double kl = 0.0;
  int clipped = 0;
  out.ratio_min = std::numeric_limits<double>::infinity();
  out.ratio_max = -std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < cols; ++c) {
    if (mask(0, c) == 0.0) continue;
    const double v = r(0, c);
    kl += (v - 1.0) - std::log(v);
    if (std::abs(v - 1.0) > config.clip) ++clipped;
    out.ratio_min = std::min(out.ratio_min, v);
    out.ratio_max = std::max(out.ratio_max, v);
  }
  out.approx_kl = kl * inv_n;
  out.clip_fraction = clipped * inv_n;
  return out;
}

UpdateStats PpoUpdate(nn::PolicyNet& net, nn::Adam& adam, std::vector<Trajectory>& trajectories,
                      const TrainerConfig& config, std::uint64_t seed) {
  UpdateStats stats;
  if (trajectories.empty()) return stats;
  ComputeAdvantages(trajectories, config.gamma, config.gae_lambda);
  if (config.normalize_advantages) NormalizeAdvantages(trajectories);

  std::vector<nn::Matrix> snapshot;
  for (const nn::Parameter* p : net.Parameters()) snapshot.push_back(p->value);
  const std::vector<nn::Matrix> m_snapshot = adam.first_moments();
  const std::vector<nn::Matrix> v_snapshot = adam.second_moments();
  const long long steps_snapshot = adam.steps();
  auto restore = [&] {
    const auto params = net.Parameters();
    for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = snapshot[i];
    adam.first_moments() = m_snapshot;
    adam.second_moments() = v_snapshot;
    adam.set_steps(steps_snapshot);
  };

  const int n = static_cast<int>(trajectories.size());
  const int mb = std::max(1, config.batch_episodes);
  std::vector<int> order(n);
  double weight_sum = 0.0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    Rng rng(MixSeed(seed, static_cast<std::uint64_t>(epoch)));
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_value = 0.0;
    int epoch_count = 0;
    for (int start = 0; start < n; start += mb) {
      const std::span<const int> idx(order.data() + start, std::min(mb, n - start));
      net.ZeroGrad();
      nn::Tape tape;
      const MinibatchLoss loss = BuildMinibatchLoss(tape, net, trajectories, idx, config);
      const double total = tape.scalar(loss.loss);
      if (!std::isfinite(total)) {
        restore();
        std::string episodes;
        for (int i : idx) episodes += " " + std::to_string(trajectories[i].episode);
        throw TrainingFault("non-finite loss at epoch " + std::to_string(epoch) +
                            ", minibatch starting " + std::to_string(start) +
                            "; policy " + std::to_string(loss.policy_loss) + ", value " +
                            std::to_string(loss.value_loss) + "; episodes" + episodes);
      }
      tape.Backward(loss.loss);
      try {
        stats.grad_norm += adam.Step();
      } catch (const TrainingFault&) {
        restore();
        throw;
      }
      if (stats.minibatches == 0) {
        stats.first_ratio_deviation =
            std::max(std::abs(loss.ratio_max - 1.0), std::abs(loss.ratio_min - 1.0));
      }
      const double w = loss.transitions;
      stats.policy_loss += w * loss.policy_loss;
      stats.value_loss += w * loss.value_loss;
      stats.approx_kl += w * loss.approx_kl;
      stats.clip_fraction += w * loss.clip_fraction;
      stats.entropy = loss.entropy;
      stats.ratio_min = std::min(stats.ratio_min, loss.ratio_min);
      stats.ratio_max = std::max(stats.ratio_max, loss.ratio_max);
      weight_sum += w;
      epoch_value += w * loss.value_loss;
      epoch_count += loss.transitions;
      ++stats.minibatches;
    }
    stats.epoch_value_loss.push_back(epoch_value / std::max(1, epoch_count));
  }
  stats.policy_loss /= weight_sum;
  stats.value_loss /= weight_sum;
  stats.approx_kl /= weight_sum;
  stats.clip_fraction /= weight_sum;
  stats.grad_norm /= std::max(1, stats.minibatches);
  return stats;
}

}  // namespace mbt::ppo
