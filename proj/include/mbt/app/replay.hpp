#ifndef MBT_APP_REPLAY_HPP_
#define MBT_APP_REPLAY_HPP_

#include <ostream>
#include <string>

#include "mbt/env/episode_log.hpp"

namespace mbt::app {

struct ReplayOptions {
  int width = 72;   // characters
  int height = 28;  // rows
  int every = 25;   // draw every n-th record (the last one is always drawn)
};

// Top-down character picture of one record: carrier outline '#', control
// point '+', robots by index digit, feet 'o' in stance and '.' in swing. The
// view is fixed over the whole episode so frames line up.
std::string RenderRecord(const env::EpisodeLog& log, const env::LogRecord& record,
                         const ReplayOptions& options = {});

// All selected records, each under a status line.
void Replay(const env::EpisodeLog& log, std::ostream& out, const ReplayOptions& options = {});

}  // namespace mbt::app

#endif  // MBT_APP_REPLAY_HPP_
