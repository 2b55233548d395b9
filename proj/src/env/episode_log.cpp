#include "mbt/env/episode_log.hpp"

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "mbt/common/errors.hpp"

namespace mbt::env {
namespace {

constexpr int kVersion = 1;
constexpr int kCarrierColumns = 19;  // numeric, before the robots
constexpr int kRobotColumns = 14;

void WritePoints(std::ostream& out, const char* key, const std::vector<Vec2>& pts) {
  out << "# " << key;
  for (const Vec2& p : pts) out << ' ' << p.x() << ',' << p.y();
  out << '\n';
}

std::vector<Vec2> ParsePoints(std::istringstream& line) {
  std::vector<Vec2> pts;
  std::string token;
  while (line >> token) {
    const auto comma = token.find(',');
    if (comma == std::string::npos) throw ConfigError("episode log: bad point " + token);
    try {
      pts.emplace_back(std::stod(token.substr(0, comma)), std::stod(token.substr(comma + 1)));
    } catch (const std::exception&) {
      throw ConfigError("episode log: bad point " + token);
    }
  }
  return pts;
}

}  // namespace

LogRecord MakeLogRecord(const sim::SimState& state, const Command& command,
                        std::span<const RewardBreakdown> rewards,
                        TerminationReason termination) {
  LogRecord rec;
  rec.step = state.step;
  rec.t = state.Time();
  rec.position = state.ControlPointPosition();
  rec.orientation = state.CarrierOrientation();
  rec.velocity = state.ControlPointVelocity();
  rec.angular_velocity = state.CarrierAngularVelocity();
  rec.command = command;
  rec.termination = std::string(TerminationName(termination));
  for (int r = 0; r < state.NumRobots(); ++r) {
    LogRobot robot;
    robot.pelvis = state.PelvisPosition(r);
    robot.yaw = Yaw(state.PelvisOrientation(r));
    for (int f = 0; f < 2; ++f) {
      const sim::FootState& foot = state.legs[r].feet[f];
      robot.feet[f] = foot.position.head<2>();
      robot.contact[f] = foot.in_stance;
    }
    robot.joint_force = state.joint_force[r];
    if (!rewards.empty()) robot.reward = rewards[r].total;
    rec.robots.push_back(robot);
  }
  return rec;
}

EpisodeLog StartEpisodeLog(const sim::SimState& state) {
  EpisodeLog log;
  log.num_robots = state.NumRobots();
  log.extent = state.config.carrier_extent;
  log.attachments = state.config.Points();
  return log;
}

void WriteLogHeader(std::ostream& out, const EpisodeLog& log) {
  out << "# episode-log " << kVersion << '\n';
  out << "# robots " << log.num_robots << '\n';
  WritePoints(out, "extent", log.extent);
  WritePoints(out, "attachments", log.attachments);
  out << "step\tt\tx\ty\tz\tqw\tqx\tqy\tqz\tvx\tvy\tvz\twx\twy\twz"
         "\tcmd_vx\tcmd_vy\tcmd_omega\tcmd_h";
  for (int r = 0; r < log.num_robots; ++r) {
    const std::string p = "r" + std::to_string(r) + "_";
    for (const char* c : {"x", "y", "z", "yaw", "lfoot_x", "lfoot_y", "rfoot_x",
                          "rfoot_y", "lcontact", "rcontact", "fx", "fy", "fz",
                          "reward"}) {
      out << '\t' << p << c;
    }
  }
  out << "\ttermination\n";
}

void WriteLogRecord(std::ostream& out, const LogRecord& rec) {
  const auto old_precision = out.precision(10);
  out << rec.step << '\t' << rec.t;
  for (double v : {rec.position.x(), rec.position.y(), rec.position.z(),
                   rec.orientation.w(), rec.orientation.x(), rec.orientation.y(),
                   rec.orientation.z(), rec.velocity.x(), rec.velocity.y(),
                   rec.velocity.z(), rec.angular_velocity.x(), rec.angular_velocity.y(),
                   rec.angular_velocity.z(), rec.command.vx, rec.command.vy,
                   rec.command.omega, rec.command.h}) {
    out << '\t' << v;
  }
  for (const LogRobot& r : rec.robots) {
    out << '\t' << r.pelvis.x() << '\t' << r.pelvis.y() << '\t' << r.pelvis.z() << '\t'
        << r.yaw;
    for (const Vec2& f : r.feet) out << '\t' << f.x() << '\t' << f.y();
    out << '\t' << r.contact[0] << '\t' << r.contact[1];
    out << '\t' << r.joint_force.x() << '\t' << r.joint_force.y() << '\t'
        << r.joint_force.z() << '\t' << r.reward;
  }
  out << '\t' << rec.termination << '\n';
  out.precision(old_precision);
}

void WriteEpisodeLog(std::ostream& out, const EpisodeLog& log) {
  WriteLogHeader(out, log);
  for (const LogRecord& rec : log.records) WriteLogRecord(out, rec);
}

EpisodeLog ReadEpisodeLog(std::istream& in) {
  EpisodeLog log;
  bool have_version = false;
  bool have_columns = false;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ss(line.substr(1));
      std::string key;
      ss >> key;
      if (key == "episode-log") {
        int version = 0;
        ss >> version;
        if (version != kVersion) throw ConfigError("episode log: unsupported version");
        have_version = true;
      } else if (key == "robots") {
        ss >> log.num_robots;
      } else if (key == "extent") {
        log.extent = ParsePoints(ss);
      } else if (key == "attachments") {
        log.attachments = ParsePoints(ss);
      }
      continue;
    }
    if (!have_version) throw ConfigError("episode log: missing header");
    if (!have_columns) {
      have_columns = true;  // column names
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, '\t')) cells.push_back(cell);
    const std::size_t expected =
        kCarrierColumns + kRobotColumns * static_cast<std::size_t>(log.num_robots) + 1;
    if (cells.size() != expected) {
      throw ConfigError("episode log: line " + std::to_string(line_no) + " has " +
                        std::to_string(cells.size()) + " columns, expected " +
                        std::to_string(expected));
    }
    std::vector<double> v;
    try {
      for (std::size_t k = 0; k + 1 < cells.size(); ++k) v.push_back(std::stod(cells[k]));
    } catch (const std::exception&) {
      throw ConfigError("episode log: line " + std::to_string(line_no) +
                        " has a non-numeric cell");
    }
    LogRecord rec;
    rec.step = static_cast<long>(v[0]);
    rec.t = v[1];
    rec.position = Vec3(v[2], v[3], v[4]);
    rec.orientation = Quat(v[5], v[6], v[7], v[8]);
    rec.velocity = Vec3(v[9], v[10], v[11]);
    rec.angular_velocity = Vec3(v[12], v[13], v[14]);
    rec.command.vx = v[15];
    rec.command.vy = v[16];
    rec.command.omega = v[17];
    rec.command.h = v[18];
    for (int r = 0; r < log.num_robots; ++r) {
      const double* p = v.data() + kCarrierColumns + kRobotColumns * r;
      LogRobot robot;
      robot.pelvis = Vec3(p[0], p[1], p[2]);
      robot.yaw = p[3];
      robot.feet = {Vec2(p[4], p[5]), Vec2(p[6], p[7])};
      robot.contact = {p[8] != 0.0, p[9] != 0.0};
      robot.joint_force = Vec3(p[10], p[11], p[12]);
      robot.reward = p[13];
      rec.robots.push_back(robot);
    }
    rec.termination = cells.back();
    log.records.push_back(std::move(rec));
  }
  if (!have_version) throw ConfigError("episode log: missing header");
  return log;
}

}  // namespace mbt::env
