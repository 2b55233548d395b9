// mbt: train, evaluate, replay and drive multi-robot carrying policies.

#include <malloc.h>
#include <signal.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "mbt/app/config.hpp"
#include "mbt/app/replay.hpp"
#include "mbt/app/server.hpp"
#include "mbt/app/teleop.hpp"
#include "mbt/common/errors.hpp"
#include "mbt/eval/evaluate.hpp"
#include "mbt/ppo/trainer.hpp"

namespace fs = std::filesystem;
using namespace mbt;

namespace {

app::AppConfig ReadConfig(const std::string& path) {
  return path.empty() ? app::AppConfig{} : app::LoadConfig(path);
}

void WriteJson(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

struct TrainArgs {
  std::string config, run_dir, resume;
  std::optional<std::uint64_t> seed;
  std::optional<int> last_stage;
  long long max_iterations = -1;
};

int Train(const TrainArgs& a) {
  app::AppConfig cfg = ReadConfig(a.config);
  if (a.seed) cfg.train.seed = *a.seed;
  if (a.last_stage) cfg.train.last_stage = *a.last_stage;
  app::ValidateConfig(cfg);
  fs::create_directories(a.run_dir);
  WriteJson(fs::path(a.run_dir) / "config.json", app::ConfigToJson(cfg));

  std::unique_ptr<ppo::Trainer> trainer =
      a.resume.empty() ? std::make_unique<ppo::Trainer>(cfg.train, a.run_dir)
                       : ppo::Trainer::Resume(a.resume, cfg.train, a.run_dir);
  std::printf("%5s %5s %10s %8s %8s %6s %9s %8s %6s\n", "iter", "stage", "steps", "length",
              "return", "fail%", "entropy", "kl", "sec");
  trainer->Run(
      [](const ppo::IterationStats& s) {
        std::printf("%5lld %5d %10lld %8.1f %8.2f %6.1f %9.3f %8.5f %6.1f%s\n", s.iteration,
                    s.stage, s.total_steps, s.mean_length, s.mean_return, s.failure_rate,
                    s.update.entropy, s.update.approx_kl, s.collect_seconds + s.update_seconds,
                    s.advanced ? "  advance" : "");
        std::fflush(stdout);
      },
      a.max_iterations);
  std::printf("checkpoints in %s\n", a.run_dir.c_str());
  return 0;
}

struct EvalArgs {
  std::string config, ckpt, out;
  std::vector<std::string> scenarios, commands;
  std::vector<double> perturbations, payloads;
  std::optional<int> episodes, workers, logged;
  std::optional<std::uint64_t> seed;
  bool episodes_json = false;
};

int Eval(const EvalArgs& a) {
  app::AppConfig cfg = ReadConfig(a.config);
  app::EvalSection& e = cfg.eval;
  if (!a.scenarios.empty()) e.scenarios = a.scenarios;
  if (!a.commands.empty()) e.commands = a.commands;
  if (!a.perturbations.empty()) e.perturbations = a.perturbations;
  if (!a.payloads.empty()) e.payloads = a.payloads;
  if (a.episodes) e.episodes = *a.episodes;
  if (a.workers) e.workers = *a.workers;
  if (a.logged) e.logged_episodes = *a.logged;
  if (a.seed) e.seed = *a.seed;
  app::ValidateConfig(cfg);

  const ppo::PolicyBundle bundle = ppo::LoadPolicyBundle(a.ckpt);
  eval::EvalPlan plan{e.scenarios, e.commands, e.perturbations, e.payloads};
  eval::EvalSettings settings;
  settings.env = cfg.train.env;
  settings.episodes = e.episodes;
  settings.workers = e.workers;
  settings.seed = e.seed;
  settings.logged_episodes = e.logged_episodes;
  if (!a.out.empty()) {
    fs::create_directories(fs::path(a.out) / "logs");
    settings.log_dir = fs::path(a.out) / "logs";
  }
  const eval::MetricsReport report = eval::RunEval(bundle, plan, settings);
  eval::WriteReportTsv(std::cout, report);
  if (!a.out.empty()) {
    std::ofstream tsv(fs::path(a.out) / "metrics.tsv");
    eval::WriteReportTsv(tsv, report);
    WriteJson(fs::path(a.out) / "metrics.json", eval::ReportJson(report, a.episodes_json));
    nlohmann::json snapshot = app::ConfigToJson(cfg);
    snapshot["checkpoint"] = a.ckpt;
    WriteJson(fs::path(a.out) / "config.json", snapshot);
  }
  return 0;
}

int ReplayLog(const std::string& file, const app::ReplayOptions& options) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open " + file);
  app::Replay(env::ReadEpisodeLog(in), std::cout, options);
  return 0;
}

struct TeleopArgs {
  std::string config, ckpt, static_dir, scenario;
  std::optional<int> port;
};

int Teleop(const TeleopArgs& a) {
  app::AppConfig cfg = ReadConfig(a.config);
  if (!a.static_dir.empty()) cfg.teleop.static_dir = a.static_dir;
  if (!a.scenario.empty()) cfg.teleop.scenario = a.scenario;
  if (a.port) cfg.teleop.port = *a.port;
  app::ValidateConfig(cfg);

  const ppo::PolicyBundle bundle = ppo::LoadPolicyBundle(a.ckpt);
  app::TeleopOptions topt;
  topt.env = cfg.train.env;
  topt.env.randomize_dynamics = cfg.teleop.randomize_dynamics;
  topt.seed = cfg.teleop.seed;
  app::TeleopSession session(bundle, eval::MakeScenario(cfg.teleop.scenario), topt);

  app::ServerOptions sopt;
  sopt.port = app::ResolvePort(cfg.teleop);
  sopt.static_dir = cfg.teleop.static_dir;
  sopt.max_pending_frames = cfg.teleop.max_pending_frames;

  // Threads started below inherit the blocked set; only this one takes signals.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  app::TeleopServer server(session, sopt);
  server.Start();
  std::printf("teleop on http://%s:%d/ (websocket /ws), scenario %s\n", sopt.address.c_str(),
              server.port(), cfg.teleop.scenario.c_str());
  std::fflush(stdout);
  int sig = 0;
  sigwait(&signals, &sig);
  server.Stop();
  std::printf("stopped after %ld frames\n", server.ticks());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  // Training allocates and frees large tape buffers every minibatch; keep them
  // in the heap instead of mapping and unmapping each time.
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
  mallopt(M_TOP_PAD, 256 << 20);

  CLI::App cli{"multi-robot carrying: train, eval, replay, teleop"};
  cli.require_subcommand(1);

  TrainArgs train;
  auto* tr = cli.add_subcommand("train", "run the training curriculum");
  tr->add_option("--config", train.config, "JSON config (defaults when omitted)")
      ->check(CLI::ExistingFile);
  tr->add_option("--run-dir", train.run_dir, "where checkpoints and metrics go")->required();
  tr->add_option("--seed", train.seed, "overrides train.seed");
  tr->add_option("--last-stage", train.last_stage, "overrides train.last_stage");
  tr->add_option("--resume", train.resume, "checkpoint to continue from")
      ->check(CLI::ExistingFile);
  tr->add_option("--max-iterations", train.max_iterations, "stop after this many iterations");

  EvalArgs ev;
  auto* ec = cli.add_subcommand("eval", "evaluate a checkpoint over scenarios and commands");
  ec->add_option("--config", ev.config)->check(CLI::ExistingFile);
  ec->add_option("--ckpt", ev.ckpt, "policy checkpoint")->required()->check(CLI::ExistingFile);
  ec->add_option("--out", ev.out, "output directory for metrics and episode logs");
  ec->add_option("--scenario", ev.scenarios, "scenario name(s)");
  ec->add_option("--command", ev.commands, "hold-still, forward, sideways, turn");
  ec->add_option("--perturbation", ev.perturbations, "push force(s), N");
  ec->add_option("--payload", ev.payloads, "payload mass(es), kg");
  ec->add_option("--episodes", ev.episodes);
  ec->add_option("--workers", ev.workers);
  ec->add_option("--logged", ev.logged, "episode logs kept per cell");
  ec->add_option("--seed", ev.seed);
  ec->add_flag("--episodes-json", ev.episodes_json, "per-episode outcomes in metrics.json");

  std::string replay_file;
  app::ReplayOptions ropt;
  auto* rp = cli.add_subcommand("replay", "draw an episode log as text frames");
  rp->add_option("log", replay_file)->required()->check(CLI::ExistingFile);
  rp->add_option("--every", ropt.every, "records between frames");
  rp->add_option("--width", ropt.width);
  rp->add_option("--height", ropt.height);

  TeleopArgs tele;
  auto* tp = cli.add_subcommand("teleop", "serve the live control UI");
  tp->add_option("--config", tele.config)->check(CLI::ExistingFile);
  tp->add_option("--ckpt", tele.ckpt, "policy checkpoint")->required()->check(CLI::ExistingFile);
  tp->add_option("--port", tele.port, std::string("overrides teleop.port; ") + app::kPortEnv +
                                          " overrides both");
  tp->add_option("--static-dir", tele.static_dir, "built UI files");
  tp->add_option("--scenario", tele.scenario);

  auto* cf = cli.add_subcommand("config", "print the default configuration");
  auto* sc = cli.add_subcommand("scenarios", "list evaluation scenarios");

  CLI11_PARSE(cli, argc, argv);
  try {
    if (*tr) return Train(train);
    if (*ec) return Eval(ev);
    if (*rp) return ReplayLog(replay_file, ropt);
    if (*tp) return Teleop(tele);
    if (*cf) {
      std::cout << app::ConfigToJson(app::AppConfig{}).dump(2) << "\n";
      return 0;
    }
    if (*sc) {
      for (const std::string& name : eval::ScenarioNames()) std::cout << name << "\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "mbt: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "mbt: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
