#include "mbt/eval/evaluate.hpp"

#include <atomic>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "mbt/common/errors.hpp"
#include "mbt/env/episode_log.hpp"

namespace mbt::eval {
namespace {

std::string FileSafe(std::string s) {
  for (char& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
  }
  return s;
}

double PayloadMass(const Scenario& s) {
  return s.payload.TotalMass();
}

std::filesystem::path LogPath(const std::filesystem::path& dir, const CellReport& cell,
                              int episode) {
  std::ostringstream name;
  name << FileSafe(cell.scenario) << '_' << cell.command << "_f"
       << static_cast<int>(std::lround(cell.perturbation)) << "_m"
       << static_cast<int>(std::lround(cell.payload)) << "_ep" << episode << ".tsv";
  return dir / name.str();
}

EpisodeOutcome RunEpisode(const ppo::PolicyBundle& bundle, const Scenario& scenario,
                          const NamedCommand& command, double perturbation,
                          const EvalSettings& settings, int index,
                          env::EpisodeLog* log) {
  env::EnvOptions options = settings.env;
  options.limits.horizon = kEvalHorizon;
  const env::EpisodeSpec spec = MakeEvalEpisode(scenario, command.command, perturbation,
                                                settings.seed, index, options);
  env::Env env(options);
  std::vector<env::Observation> obs = env.Reset(spec);
  ppo::PolicyRunner runner(bundle, env.NumRobots());

  Trajectory traj;
  traj.perturbed = !spec.perturbations.empty();
  auto record_pose = [&] {
    const sim::SimState& s = env.state();
    traj.Append(s.Time(), s.ControlPointPosition().head<2>(), Yaw(s.CarrierOrientation()));
  };
  record_pose();
  if (log) {
    *log = env::StartEpisodeLog(env.state());
    log->records.push_back(
        env::MakeLogRecord(env.state(), env.command(), {}, env::TerminationReason::kNone));
  }

  EpisodeOutcome out;
  out.index = index;
  out.perturbed = traj.perturbed;
  try {
    while (!env.done()) {
      const std::vector<sim::ActionCommand> actions = runner.Act(obs);
      env::StepResult step = env.Step(actions);
      record_pose();
      traj.power.push_back(env.state().Power());
      if (log) {
        log->records.push_back(
            env::MakeLogRecord(env.state(), env.command(), step.rewards, step.termination));
      }
      obs = std::move(step.observations);
    }
    out.termination = std::string(env::TerminationName(env.termination()));
  } catch (const NumericalFault&) {
    out.fault = true;
    out.termination = "fault";
  } catch (const SolverError&) {
    out.fault = true;
    out.termination = "fault";
  }
  out.steps = env.step();
  out.duration = traj.Duration();
  out.early = out.fault || out.steps < kEvalHorizon;
  out.drift = ComputeDrift(traj, command.command);
  if (out.fault) out.drift = Drift{0.0, 0.0, 0.0, DriftExclusion::kEmpty};
  out.power = MeanPower(traj);
  return out;
}

}  // namespace

std::vector<sim::PerturbationSpec> EvalPushes(double force, int horizon, Rng& rng,
                                              const env::EnvOptions& options) {
  std::vector<sim::PerturbationSpec> out;
  if (!(force > 0.0)) return out;
  int t = UniformInt(rng, 0, options.max_push_gap);
  while (t < horizon) {
    sim::PerturbationSpec p;
    p.start_step = t;
    p.duration_steps = UniformInt(rng, options.min_push_steps, options.max_push_steps);
    const double angle = UniformReal(rng, -kPi, kPi);
    p.force = Vec3(force * std::cos(angle), force * std::sin(angle), 0.0);
    p.target = sim::PerturbationSpec::kCarrier;
    out.push_back(p);
    t = p.EndStep() + UniformInt(rng, 0, options.max_push_gap);
  }
  return out;
}

env::EpisodeSpec MakeEvalEpisode(const Scenario& scenario, const env::Command& command,
                                 double perturbation, std::uint64_t seed, int episode,
                                 const env::EnvOptions& options) {
  Rng rng(MixSeed(seed, static_cast<std::uint64_t>(episode)));
  env::EpisodeSpec spec;
  spec.horizon = kEvalHorizon;
  spec.config = scenario.config;
  if (options.randomize_dynamics) {
    spec.dynamics = sim::RandomizeDynamics(rng, options.randomization);
  }
  spec.payload = scenario.PayloadFor(rng);
  env::Command c = command;
  c.duration = kEvalHorizon;
  spec.commands = {c};
  for (int r = 0; r < spec.config.NumRobots(); ++r) spec.noise_seeds.push_back(rng());
  spec.initial_yaw = UniformReal(rng, -kPi, kPi);
  // Separate stream so the push force does not shift the other draws.
  Rng push_rng(MixSeed(seed, static_cast<std::uint64_t>(episode), 1));
  spec.perturbations = EvalPushes(perturbation, kEvalHorizon, push_rng, options);
  return spec;
}

void Summarize(CellReport& cell) {
  cell.episodes = static_cast<int>(cell.outcomes.size());
  cell.early = 0;
  cell.drift_episodes = 0;
  double length = 0.0, dx = 0.0, dy = 0.0, dth = 0.0, abs_dth = 0.0, power = 0.0;
  for (const EpisodeOutcome& o : cell.outcomes) {
    cell.early += o.early ? 1 : 0;
    length += static_cast<double>(o.steps);
    power += o.power;
    if (o.drift.valid()) {
      ++cell.drift_episodes;
      dx += o.drift.dx;
      dy += o.drift.dy;
      dth += Rad2Deg(o.drift.dtheta);
      abs_dth += std::abs(Rad2Deg(o.drift.dtheta));
    }
  }
  cell.failure_rate = FailureRate(cell.early, cell.episodes);
  cell.mean_length = length / cell.episodes;
  cell.power = power / cell.episodes;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const int n = cell.drift_episodes;
  cell.dx = n ? dx / n : nan;
  cell.dy = n ? dy / n : nan;
  cell.dtheta_deg = n ? dth / n : nan;
  cell.mean_abs_dtheta_deg = n ? abs_dth / n : nan;
}

CellReport RunCell(const ppo::PolicyBundle& bundle, const Scenario& scenario,
                   const NamedCommand& command, double perturbation,
                   const EvalSettings& settings) {
  if (settings.episodes < 1) throw ConfigError("evaluation needs at least one episode");
  scenario.config.Validate();
  if (bundle.net.input_size() != env::kObsDim ||
      bundle.net.log_std.value.rows() != sim::kActionDim) {
    throw ConfigError("policy takes " + std::to_string(bundle.net.input_size()) +
                      " inputs and gives " + std::to_string(bundle.net.log_std.value.rows()) +
                      " actions; the environment needs " + std::to_string(env::kObsDim) +
                      " and " + std::to_string(sim::kActionDim));
  }
  CellReport cell;
  cell.scenario = scenario.name;
  cell.command = command.name;
  cell.perturbation = perturbation;
  cell.payload = PayloadMass(scenario);
  cell.num_robots = scenario.config.NumRobots();
  cell.outcomes.resize(settings.episodes);

  const int logged = settings.log_dir ? std::min(settings.logged_episodes, settings.episodes) : 0;
  if (logged > 0) std::filesystem::create_directories(*settings.log_dir);
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto work = [&] {
    try {
      for (int k = next++; k < settings.episodes; k = next++) {
        env::EpisodeLog log;
        cell.outcomes[k] = RunEpisode(bundle, scenario, command, perturbation, settings, k,
                                      k < logged ? &log : nullptr);
        if (k < logged) {
          std::ofstream f(LogPath(*settings.log_dir, cell, k));
          env::WriteEpisodeLog(f, log);
          if (!f) throw ConfigError("cannot write episode log");
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
      next = settings.episodes;
    }
  };
  const int workers = std::max(1, std::min(settings.workers, settings.episodes));
  std::vector<std::thread> threads;
  for (int w = 1; w < workers; ++w) threads.emplace_back(work);
  work();
  for (std::thread& t : threads) t.join();
  if (error) std::rethrow_exception(error);
  Summarize(cell);
  return cell;
}

double AverageFailureRate(std::span<const CellReport> cells) {
  if (cells.empty()) throw ConfigError("no cells to average");
  double sum = 0.0;
  for (const CellReport& c : cells) sum += c.failure_rate;
  return sum / static_cast<double>(cells.size());
}

MetricsReport RunEval(const ppo::PolicyBundle& bundle, const EvalPlan& plan,
                      const EvalSettings& settings) {
  MetricsReport report;
  report.seed = settings.seed;
  report.episodes = settings.episodes;
  std::vector<double> payloads = plan.payloads;
  if (payloads.empty()) payloads.push_back(-1.0);
  for (const std::string& name : plan.scenarios) {
    for (double payload : payloads) {
      const Scenario scenario = MakeScenario(name, payload);
      for (const std::string& cmd : plan.commands) {
        const NamedCommand& command = FindCommand(cmd);
        for (double force : plan.perturbations) {
          if (force < 0.0) throw ConfigError("perturbation force must be >= 0");
          report.cells.push_back(RunCell(bundle, scenario, command, force, settings));
        }
      }
    }
  }
  return report;
}

void WriteReportTsv(std::ostream& out, const MetricsReport& report) {
  out << "# power: " << report.power_definition << '\n';
  out << "# drift: mean over episodes lasting >= 1 s without perturbation; "
         "command-aligned frame, negative = behind\n";
  out << "scenario\tcommand\tperturbation_n\tpayload_kg\trobots\tepisodes\tearly"
         "\tfailure_rate\tmean_length\tdrift_episodes\tdx_m\tdy_m\tdtheta_deg"
         "\tabs_dtheta_deg\tpower_w\n";
  const auto old = out.flags();
  for (const CellReport& c : report.cells) {
    out << c.scenario << '\t' << c.command << '\t' << c.perturbation << '\t' << c.payload
        << '\t' << c.num_robots << '\t' << c.episodes << '\t' << c.early << '\t';
    out << std::fixed;
    out.precision(2);
    out << c.failure_rate << '\t' << c.mean_length << '\t' << c.drift_episodes << '\t'
        << c.dx << '\t' << c.dy << '\t' << c.dtheta_deg << '\t' << c.mean_abs_dtheta_deg
        << '\t' << c.power << '\n';
    out.flags(old);
    out.precision(6);
  }
}

nlohmann::json ReportJson(const MetricsReport& report, bool with_episodes) {
  auto num = [](double v) -> nlohmann::json {
    if (std::isnan(v)) return nullptr;
    return v;
  };
  nlohmann::json j;
  j["seed"] = report.seed;
  j["episodes"] = report.episodes;
  j["horizon_steps"] = kEvalHorizon;
  j["power_definition"] = report.power_definition;
  j["cells"] = nlohmann::json::array();
  for (const CellReport& c : report.cells) {
    nlohmann::json cell{
        {"scenario", c.scenario},
        {"command", c.command},
        {"perturbation_n", c.perturbation},
        {"payload_kg", c.payload},
        {"robots", c.num_robots},
        {"episodes", c.episodes},
        {"early", c.early},
        {"failure_rate", c.failure_rate},
        {"mean_length", c.mean_length},
        {"drift_episodes", c.drift_episodes},
        {"dx_m", num(c.dx)},
        {"dy_m", num(c.dy)},
        {"dtheta_deg", num(c.dtheta_deg)},
        {"abs_dtheta_deg", num(c.mean_abs_dtheta_deg)},
        {"power_w", c.power},
    };
    if (with_episodes) {
      nlohmann::json eps = nlohmann::json::array();
      for (const EpisodeOutcome& o : c.outcomes) {
        eps.push_back({{"index", o.index},
                       {"steps", o.steps},
                       {"termination", o.termination},
                       {"early", o.early},
                       {"fault", o.fault},
                       {"perturbed", o.perturbed},
                       {"drift_included", o.drift.valid()},
                       {"dx_m", o.drift.dx},
                       {"dy_m", o.drift.dy},
                       {"dtheta_deg", Rad2Deg(o.drift.dtheta)},
                       {"power_w", o.power}});
      }
      cell["outcomes"] = std::move(eps);
    }
    j["cells"].push_back(std::move(cell));
  }
  return j;
}

}  // namespace mbt::eval
