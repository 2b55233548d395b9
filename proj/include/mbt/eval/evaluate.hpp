#ifndef MBT_EVAL_EVALUATE_HPP_
#define MBT_EVAL_EVALUATE_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mbt/env/env.hpp"
#include "mbt/eval/metrics.hpp"
#include "mbt/eval/scenario.hpp"
#include "mbt/ppo/runner.hpp"

namespace mbt::eval {

inline const std::vector<double> kPerturbationGrid{0.0, 25.0, 50.0, 75.0, 100.0};
inline const std::vector<double> kPayloadGrid{20.0, 40.0, 60.0, 80.0};

struct EvalSettings {
  env::EnvOptions env;  // the horizon is always kEvalHorizon
  int episodes = 100;
  int workers = 1;
  std::uint64_t seed = 0;
  // Episode logs of the first `logged_episodes` episodes of every cell.
  std::optional<std::filesystem::path> log_dir;
  int logged_episodes = 1;
};

struct EpisodeOutcome {
  int index = 0;
  long steps = 0;
  double duration = 0.0;  // s
  std::string termination = "none";
  bool early = false;     // ended before the horizon
  bool fault = false;     // simulator failure, counted as early
  bool perturbed = false;
  Drift drift;            // flagged when excluded
  double power = 0.0;
};

struct CellReport {
  std::string scenario;
  std::string command;
  double perturbation = 0.0;  // N
  double payload = 0.0;       // kg, total fixed + dynamic
  int num_robots = 0;

  int episodes = 0;
  int early = 0;
  double failure_rate = 0.0;  // %
  double mean_length = 0.0;   // policy steps

  int drift_episodes = 0;  // episodes >= 1 s without perturbation
  double dx = 0.0;         // mean, m (NaN when no episode qualifies)
  double dy = 0.0;
  double dtheta_deg = 0.0;
  double mean_abs_dtheta_deg = 0.0;
  double power = 0.0;  // mean over episodes

  std::vector<EpisodeOutcome> outcomes;
};

struct MetricsReport {
  std::uint64_t seed = 0;
  int episodes = 0;
  std::string power_definition = kPowerDefinition;
  std::vector<CellReport> cells;
};

// Pushes of exactly `force` newtons on the carrier in random horizontal
// directions, on the training schedule of durations and gaps.
std::vector<sim::PerturbationSpec> EvalPushes(double force, int horizon, Rng& rng,
                                              const env::EnvOptions& options);

// The episode run for index `episode`. The draws depend only on the seed and
// the index, so every cell sees the same dynamics and starting yaw.
env::EpisodeSpec MakeEvalEpisode(const Scenario& scenario, const env::Command& command,
                                 double perturbation, std::uint64_t seed, int episode,
                                 const env::EnvOptions& options);

// Deterministic policy (the Gaussian mean). Throws ConfigError when the
// scenario does not validate.
CellReport RunCell(const ppo::PolicyBundle& bundle, const Scenario& scenario,
                   const NamedCommand& command, double perturbation,
                   const EvalSettings& settings);

// Fills the report aggregates from `outcomes`.
void Summarize(CellReport& cell);

// Failure rate averaged with equal weight over the cells.
double AverageFailureRate(std::span<const CellReport> cells);

struct EvalPlan {
  std::vector<std::string> scenarios{"rect-4"};
  std::vector<std::string> commands{"hold-still", "forward", "sideways", "turn"};
  std::vector<double> perturbations{0.0};
  std::vector<double> payloads;  // empty keeps the scenario default
};

MetricsReport RunEval(const ppo::PolicyBundle& bundle, const EvalPlan& plan,
                      const EvalSettings& settings);

void WriteReportTsv(std::ostream& out, const MetricsReport& report);
nlohmann::json ReportJson(const MetricsReport& report, bool with_episodes = false);

}  // namespace mbt::eval

#endif  // MBT_EVAL_EVALUATE_HPP_
