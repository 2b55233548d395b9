#include "mbt/app/replay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "mbt/common/errors.hpp"

namespace mbt::app {
namespace {

struct View {
  double x0, y0, scale_x, scale_y;
  int w, h;

  bool Cell(const Vec2& p, int* col, int* row) const {
    *col = static_cast<int>(std::lround((p.x() - x0) * scale_x));
    *row = h - 1 - static_cast<int>(std::lround((p.y() - y0) * scale_y));
    return *col >= 0 && *col < w && *row >= 0 && *row < h;
  }
};

std::vector<Vec2> Outline(const env::EpisodeLog& log, const env::LogRecord& r) {
  std::vector<Vec2> out;
  for (const Vec2& p : log.extent) {
    const Vec3 w = r.position + r.orientation * Vec3(p.x(), p.y(), 0.0);
    out.emplace_back(w.x(), w.y());
  }
  return out;
}

View FitView(const env::EpisodeLog& log, const ReplayOptions& o) {
  double lo_x = 1e300, lo_y = 1e300, hi_x = -1e300, hi_y = -1e300;
  auto grow = [&](const Vec2& p) {
    lo_x = std::min(lo_x, p.x());
    lo_y = std::min(lo_y, p.y());
    hi_x = std::max(hi_x, p.x());
    hi_y = std::max(hi_y, p.y());
  };
  for (const env::LogRecord& r : log.records) {
    for (const Vec2& p : Outline(log, r)) grow(p);
    for (const env::LogRobot& rb : r.robots) {
      grow(rb.pelvis.head<2>());
      for (const Vec2& f : rb.feet) grow(f);
    }
  }
  const double margin = 0.3;
  lo_x -= margin, lo_y -= margin, hi_x += margin, hi_y += margin;
  // Characters are about twice as tall as wide: one row spans two columns.
  const double span = std::max((hi_x - lo_x) / (o.width - 1), 2.0 * (hi_y - lo_y) / (o.height - 1));
  const double cx = 0.5 * (lo_x + hi_x), cy = 0.5 * (lo_y + hi_y);
  View v;
  v.w = o.width;
  v.h = o.height;
  v.scale_x = 1.0 / span;
  v.scale_y = 0.5 / span;
  v.x0 = cx - 0.5 * (o.width - 1) * span;
  v.y0 = cy - (o.height - 1) * span;
  return v;
}

void Put(std::vector<std::string>& grid, const View& v, const Vec2& p, char c) {
  int col, row;
  if (v.Cell(p, &col, &row)) grid[row][col] = c;
}

std::string Render(const env::EpisodeLog& log, const env::LogRecord& r, const View& v) {
  std::vector<std::string> grid(v.h, std::string(v.w, ' '));
  const std::vector<Vec2> outline = Outline(log, r);
  for (size_t i = 0; i < outline.size(); ++i) {
    const Vec2& a = outline[i];
    const Vec2& b = outline[(i + 1) % outline.size()];
    const int n = 1 + static_cast<int>(4.0 * (b - a).norm() * std::max(v.scale_x, v.scale_y));
    for (int k = 0; k <= n; ++k) Put(grid, v, a + (b - a) * (static_cast<double>(k) / n), '#');
  }
  Put(grid, v, r.position.head<2>(), '+');
  for (size_t i = 0; i < r.robots.size(); ++i) {
    const env::LogRobot& rb = r.robots[i];
    for (int f = 0; f < 2; ++f) Put(grid, v, rb.feet[f], rb.contact[f] ? 'o' : '.');
    Put(grid, v, rb.pelvis.head<2>(), static_cast<char>('0' + i % 10));
  }
  std::string out;
  for (const std::string& line : grid) {
    std::string trimmed = line.substr(0, line.find_last_not_of(' ') + 1);
    out += trimmed + "\n";
  }
  return out;
}

std::string Status(const env::LogRecord& r) {
  const Vec3 rpy = RollPitchYaw(r.orientation);
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "t %6.2f  step %4ld  x %+6.2f y %+6.2f z %5.2f  yaw %+7.1f deg  "
                "cmd %+.2f %+.2f %+.2f h %.2f  %s\n",
                r.t, r.step, r.position.x(), r.position.y(), r.position.z(),
                rpy.z() * 180.0 / M_PI, r.command.vx, r.command.vy, r.command.omega, r.command.h,
                r.termination.c_str());
  return buf;
}

}  // namespace

std::string RenderRecord(const env::EpisodeLog& log, const env::LogRecord& record,
                         const ReplayOptions& options) {
  if (options.width < 8 || options.height < 4) throw ConfigError("replay view too small");
  return Render(log, record, FitView(log, options));
}

void Replay(const env::EpisodeLog& log, std::ostream& out, const ReplayOptions& options) {
  if (options.width < 8 || options.height < 4) throw ConfigError("replay view too small");
  if (options.every < 1) throw ConfigError("replay stride must be at least 1");
  if (log.records.empty()) return;
  const View v = FitView(log, options);
  const size_t n = log.records.size();
  for (size_t i = 0; i < n; ++i) {
    if (i % options.every != 0 && i + 1 != n) continue;
    out << Status(log.records[i]) << Render(log, log.records[i], v) << "\n";
  }
}

}  // namespace mbt::app
